"""Back-off n-gram language models over syllable tokens.

Training uses interpolated Kneser-Ney with a fixed 0.75 discount at every
order.  Corpora too small to exhibit the count-of-count statistics KN relies
on (no singleton or no doubleton k-gram count for some order) fall back to
interpolated add-0.01 smoothing; both are written in exact back-off form, so
every stored context's distribution sums to one over the vocabulary.

Internal probabilities are log10 and serialize to ARPA text; the public
scoring API returns natural logs.  Sentences get implicit <s> and </s>
boundaries, and <unk> is always part of the vocabulary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import FormatError

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

LN10 = math.log(10.0)

KN_DISCOUNT = 0.75
ADDK = 0.01
BOS_LOG10 = -99.0

Gram = tuple[str, ...]


@dataclass
class NGramModel:
    order: int
    vocab: tuple[str, ...]  # sorted; includes <s>, </s>, <unk>
    logp: tuple[dict[Gram, float], ...]  # [k-1] -> k-gram -> log10 p
    bow: tuple[dict[Gram, float], ...]   # [k-1] -> k-gram context -> log10 bow
    smoothing: str = "kneser-ney"
    _vocab_set: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        if self.order < 1 or self.order > 5:
            raise ValueError("order must be in 1..5")
        self._vocab_set = frozenset(self.vocab)

    def fold(self, token: str) -> str:
        return token if token in self._vocab_set else UNK

    def bow_log10(self, context: Gram) -> float:
        if not context or len(context) >= self.order:
            return 0.0
        return self.bow[len(context) - 1].get(context, 0.0)

    def cond_log10(self, context: Sequence[str], word: str) -> float:
        """log10 P(word | context) with standard back-off semantics."""
        w = self.fold(word)
        ctx = tuple(self.fold(t) for t in context)
        if len(ctx) > self.order - 1:
            ctx = ctx[len(ctx) - (self.order - 1):]
        # only stored contexts can host higher-order grams
        while ctx and ctx not in self.logp[len(ctx) - 1]:
            ctx = ctx[1:]
        acc = 0.0
        while True:
            gram = ctx + (w,)
            p = self.logp[len(gram) - 1].get(gram)
            if p is not None:
                return acc + p
            if not ctx:
                raise FormatError(f"vocabulary token {w!r} has no unigram")
            acc += self.bow_log10(ctx)
            ctx = ctx[1:]

    def score(self, tokens: Sequence[str]) -> float:
        """Natural-log probability of a sentence, boundaries included.

        The empty sequence scores log p(</s> | <s>).
        """
        ctx: Gram = (BOS,)
        total = 0.0
        for tok in tokens:
            total += self.cond_log10(ctx, tok)
            ctx = ctx + (self.fold(tok),)
        total += self.cond_log10(ctx, EOS)
        return total * LN10

    def score_tokens(self, tokens: Sequence[str]) -> float:
        """Natural-log probability of tokens alone, no boundary terms."""
        ctx: Gram = ()
        total = 0.0
        for tok in tokens:
            total += self.cond_log10(ctx, tok)
            ctx = ctx + (self.fold(tok),)
        return total * LN10


def perplexity(model: NGramModel, corpus: Sequence[Sequence[str]]) -> float:
    """Per-token perplexity over sentences; </s> counts as a token."""
    total_ln = 0.0
    n_tokens = 0
    for line in corpus:
        total_ln += model.score(line)
        n_tokens += len(line) + 1
    if n_tokens == 0:
        raise ValueError("empty corpus")
    return math.exp(-total_ln / n_tokens)


def _count_windows(sentences: list[list[str]], order: int) -> list[dict[Gram, int]]:
    counts: list[dict[Gram, int]] = [{} for _ in range(order)]
    for sent in sentences:
        padded = [BOS] + sent + [EOS]
        for k in range(1, order + 1):
            table = counts[k - 1]
            for i in range(len(padded) - k + 1):
                g = tuple(padded[i:i + k])
                table[g] = table.get(g, 0) + 1
    return counts


def _needs_fallback(counts: list[dict[Gram, int]]) -> bool:
    """KN needs singleton and doubleton counts at every order."""
    for table in counts:
        vals = [c for g, c in table.items() if g != (BOS,)]
        if not vals or 1 not in vals or 2 not in vals:
            return True
    return False


def train_ngram(
    corpus: Sequence[Sequence[str]], order: int, smoothing: str = "auto"
) -> NGramModel:
    """Train an order-n back-off model on tokenized sentences.

    smoothing: "auto" (KN, falling back to add-k on degenerate corpora),
    "kneser-ney", or "add-k".
    """
    if order < 1 or order > 5:
        raise ValueError("order must be in 1..5")
    sentences = [list(line) for line in corpus]
    if not any(sentences):
        raise ValueError("training corpus has no tokens")
    raw = _count_windows(sentences, order)

    if smoothing == "auto":
        smoothing = "add-k" if _needs_fallback(raw) else "kneser-ney"
    if smoothing not in ("kneser-ney", "add-k"):
        raise ValueError(f"unknown smoothing {smoothing!r}")

    tokens = sorted({t for sent in sentences for t in sent} | {EOS, UNK, BOS})
    vocab = tuple(tokens)
    predicted = [t for t in vocab if t != BOS]
    v_size = len(predicted)

    # Effective counts per level: the top level always uses raw counts; KN
    # lower levels use left-continuation type counts, except for <s>-initial
    # grams, which can never be continued from the left.
    eff: list[dict[Gram, int]] = [dict(raw[k]) for k in range(order)]
    if smoothing == "kneser-ney":
        for k in range(order - 1):  # levels 1..order-1
            cont: dict[Gram, int] = {}
            for g in raw[k]:
                if g[0] == BOS:
                    cont[g] = raw[k][g]
            seen_left: dict[Gram, set] = {}
            for g in raw[k + 1]:
                suffix = g[1:]
                if suffix[0] == BOS:
                    continue
                seen_left.setdefault(suffix, set()).add(g[0])
            for suffix, lefts in seen_left.items():
                cont[suffix] = len(lefts)
            eff[k] = cont

    base = 1.0 / v_size
    disc = KN_DISCOUNT if smoothing == "kneser-ney" else 0.0
    kv = ADDK * v_size if smoothing == "add-k" else 0.0

    # context sums and continuation-type counts per level
    dens: list[dict[Gram, float]] = [{} for _ in range(order)]
    types: list[dict[Gram, int]] = [{} for _ in range(order)]
    for k in range(order):
        for g, c in eff[k].items():
            if g == (BOS,) or g[-1] == BOS:
                continue
            h = g[:-1]
            dens[k][h] = dens[k].get(h, 0.0) + c
            types[k][h] = types[k].get(h, 0) + 1

    def prob(k: int, gram: Gram) -> float:
        """Interpolated probability at level k+1 (gram has k+1 tokens)."""
        h, w = gram[:-1], gram[-1]
        lower = base if k == 0 else prob(k - 1, gram[1:])
        den = dens[k].get(h, 0.0)
        if den == 0.0:
            return lower
        c = eff[k].get(gram, 0)
        if smoothing == "kneser-ney":
            t = types[k][h]
            return max(c - disc, 0.0) / den + disc * t / den * lower
        return (c + kv * lower) / (den + kv)

    logp: list[dict[Gram, float]] = [{} for _ in range(order)]
    bow: list[dict[Gram, float]] = [{} for _ in range(order)]

    for w in predicted:
        g = (w,)
        logp[0][g] = math.log10(prob(0, g))
    logp[0][(BOS,)] = BOS_LOG10
    for k in range(1, order):
        for g in raw[k]:
            if g[-1] == BOS:
                continue
            logp[k][g] = math.log10(prob(k, g))
    for k in range(order - 1):
        for h, den in dens[k + 1].items():
            if smoothing == "kneser-ney":
                weight = disc * types[k + 1][h] / den
            else:
                weight = kv / (den + kv)
            bow[k][h] = math.log10(weight)

    return NGramModel(
        order=order,
        vocab=vocab,
        logp=tuple(logp),
        bow=tuple(bow),
        smoothing=smoothing,
    )


def serialize_arpa(model: NGramModel) -> str:
    """ARPA text form; deterministic (sections sorted lexicographically)."""
    lines = ["\\data\\"]
    for k in range(model.order):
        lines.append(f"ngram {k + 1}={len(model.logp[k])}")
    for k in range(model.order):
        lines.append("")
        lines.append(f"\\{k + 1}-grams:")
        for g in sorted(model.logp[k]):
            row = f"{model.logp[k][g]!r}\t{' '.join(g)}"
            if k < model.order - 1 and g in model.bow[k]:
                row += f"\t{model.bow[k][g]!r}"
            lines.append(row)
    lines.append("")
    lines.append("\\end\\")
    return "\n".join(lines) + "\n"


def parse_arpa(text: str) -> NGramModel:
    lines = text.splitlines()
    i = 0
    while i < len(lines) and lines[i].strip() != "\\data\\":
        if lines[i].strip():
            raise FormatError(f"line {i + 1}: expected \\data\\ header")
        i += 1
    if i == len(lines):
        raise FormatError("missing \\data\\ header")
    i += 1
    declared: list[int] = []
    while i < len(lines) and lines[i].strip():
        head = lines[i].strip()
        if not head.startswith("ngram "):
            raise FormatError(f"line {i + 1}: expected 'ngram N=count'")
        try:
            n_txt, cnt_txt = head[len("ngram "):].split("=")
            n, cnt = int(n_txt), int(cnt_txt)
        except ValueError:
            raise FormatError(f"line {i + 1}: bad ngram count line") from None
        if n != len(declared) + 1:
            raise FormatError(f"line {i + 1}: ngram orders must be 1..N in sequence")
        declared.append(cnt)
        i += 1
    order = len(declared)
    if order < 1 or order > 5:
        raise FormatError("ARPA order must be in 1..5")
    logp: list[dict[Gram, float]] = [{} for _ in range(order)]
    bow: list[dict[Gram, float]] = [{} for _ in range(order)]
    for k in range(order):
        while i < len(lines) and not lines[i].strip():
            i += 1
        if i == len(lines) or lines[i].strip() != f"\\{k + 1}-grams:":
            raise FormatError(f"line {i + 1}: expected \\{k + 1}-grams: section")
        i += 1
        while i < len(lines) and lines[i].strip() and not lines[i].startswith("\\"):
            parts = lines[i].split("\t")
            if len(parts) not in (2, 3):
                raise FormatError(f"line {i + 1}: expected 'logp<TAB>gram[<TAB>bow]'")
            try:
                p = float(parts[0])
            except ValueError:
                raise FormatError(f"line {i + 1}: bad log-probability") from None
            g = tuple(parts[1].split())
            if len(g) != k + 1:
                raise FormatError(f"line {i + 1}: gram should have {k + 1} tokens")
            if g in logp[k]:
                raise FormatError(f"line {i + 1}: duplicate gram {' '.join(g)!r}")
            logp[k][g] = p
            if len(parts) == 3:
                if k == order - 1:
                    raise FormatError(f"line {i + 1}: top-order grams cannot carry bow")
                try:
                    bow[k][g] = float(parts[2])
                except ValueError:
                    raise FormatError(f"line {i + 1}: bad back-off weight") from None
            i += 1
        if len(logp[k]) != declared[k]:
            raise FormatError(
                f"\\{k + 1}-grams: section has {len(logp[k])} entries, "
                f"header declared {declared[k]}"
            )
    while i < len(lines) and not lines[i].strip():
        i += 1
    if i == len(lines) or lines[i].strip() != "\\end\\":
        raise FormatError("missing \\end\\ marker")
    vocab = tuple(sorted({g[0] for g in logp[0]} | {BOS, EOS, UNK}))
    for required in (BOS, EOS, UNK):
        if (required,) not in logp[0]:
            raise FormatError(f"ARPA model is missing the {required} unigram")
    return NGramModel(order=order, vocab=vocab, logp=tuple(logp), bow=tuple(bow),
                      smoothing="unknown")


@dataclass
class LmAutomaton:
    """Integerized back-off state machine for decoding.

    States are the stored contexts (grams of length < order, plus the empty
    context 0).  A query walks the back-off chain: look up (state, word); on
    a miss add the state's back-off weight and retry from the suffix state.
    """

    n_words: int
    word_index: Mapping[str, int]
    keys: np.ndarray         # int64, sorted: state * n_words + word
    logp: np.ndarray         # float64 log10, parallel to keys
    next_state: np.ndarray   # int64, parallel to keys
    bow: np.ndarray          # float64 log10 per state
    parent: np.ndarray       # int64 per state (suffix context)
    initial: int
    eos: int
    unk: int

    def query(self, state: int, word: int) -> tuple[float, int]:
        acc = 0.0
        keys = self.keys
        while True:
            key = state * self.n_words + word
            i = int(np.searchsorted(keys, key))
            if i < len(keys) and keys[i] == key:
                return acc + float(self.logp[i]), int(self.next_state[i])
            acc += float(self.bow[state])
            state = int(self.parent[state])


def build_automaton(model: NGramModel) -> LmAutomaton:
    word_index = {w: i for i, w in enumerate(model.vocab)}
    n_words = len(model.vocab)

    contexts: list[Gram] = [()]
    for k in range(model.order - 1):
        contexts.extend(sorted(model.logp[k]))
    state_index = {g: i for i, g in enumerate(contexts)}

    def suffix_state(g: Gram) -> int:
        while g not in state_index:
            g = g[1:]
        return state_index[g]

    keys, logps, nexts = [], [], []
    for k in range(model.order):
        for g, p in model.logp[k].items():
            if g[:-1] not in state_index:
                continue  # unreachable under back-off semantics
            target = g if len(g) <= model.order - 1 else g[1:]
            keys.append(state_index[g[:-1]] * n_words + word_index[g[-1]])
            logps.append(p)
            nexts.append(suffix_state(target))
    order_idx = np.argsort(np.asarray(keys, dtype=np.int64), kind="stable")
    keys_arr = np.asarray(keys, dtype=np.int64)[order_idx]
    if len(np.unique(keys_arr)) != len(keys_arr):
        raise FormatError("ARPA model stores a gram twice under one context")

    bow = np.zeros(len(contexts), dtype=np.float64)
    parent = np.zeros(len(contexts), dtype=np.int64)
    for g, i in state_index.items():
        if g:
            bow[i] = model.bow_log10(g)
            parent[i] = suffix_state(g[1:])

    return LmAutomaton(
        n_words=n_words,
        word_index=word_index,
        keys=keys_arr,
        logp=np.asarray(logps, dtype=np.float64)[order_idx],
        next_state=np.asarray(nexts, dtype=np.int64)[order_idx],
        bow=bow,
        parent=parent,
        initial=suffix_state((BOS,)),
        eos=word_index[EOS],
        unk=word_index[UNK],
    )
