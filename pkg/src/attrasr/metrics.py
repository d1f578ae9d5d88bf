"""Error-rate metrics over syllable and attribute sequences.

All corpus-level rates are pooled: total edit operations divided by total
reference tokens, not an average of per-utterance rates.  Rates are left
unclamped, so heavy insertion can push them above 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from . import kernels
from .errors import FormatError
from .inventory import KnowledgeSource
from .lexicon import HomonymClassIndex, Lexicon, syllable_to_attributes

_OP_NAMES = ("match", "sub", "del", "ins")


@dataclass(frozen=True)
class Alignment:
    """Minimum-edit alignment between a reference and a hypothesis."""

    ops: tuple[str, ...]
    matches: int
    substitutions: int
    deletions: int
    insertions: int

    @property
    def distance(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def edit_distance(ref: Sequence[Hashable], hyp: Sequence[Hashable]) -> Alignment:
    """Align two token sequences with unit costs.

    Ties in the backtrace prefer match, then substitution, then deletion,
    then insertion, which pins down one canonical alignment.  Tokens may be
    any hashable values (strings, attribute tuples, ...).
    """
    ids: dict[Hashable, int] = {}
    ref_ids = [ids.setdefault(tok, len(ids)) for tok in ref]
    hyp_ids = [ids.setdefault(tok, len(ids)) for tok in hyp]
    ops, n_match, n_sub, n_del, n_ins = kernels.levenshtein(ref_ids, hyp_ids)
    return Alignment(
        ops=tuple(_OP_NAMES[c] for c in ops),
        matches=n_match,
        substitutions=n_sub,
        deletions=n_del,
        insertions=n_ins,
    )


@dataclass(frozen=True)
class MetricResult:
    """A pooled error rate plus its edit-operation breakdown."""

    name: str
    matches: int
    substitutions: int
    deletions: int
    insertions: int
    ref_tokens: int
    per_utterance: tuple[tuple[str, int, int], ...] = field(default=())

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def rate(self) -> float:
        if self.ref_tokens == 0:
            raise ValueError(f"{self.name}: empty reference, rate undefined")
        return self.errors / self.ref_tokens


def _pooled(
    name: str,
    refs: Sequence[Sequence[Hashable]],
    hyps: Sequence[Sequence[Hashable]],
    ids: Sequence[str] | None,
) -> MetricResult:
    if len(refs) != len(hyps):
        raise ValueError(
            f"{name}: {len(refs)} references vs {len(hyps)} hypotheses"
        )
    if ids is not None and len(ids) != len(refs):
        raise ValueError(f"{name}: {len(ids)} ids for {len(refs)} utterances")
    matches = subs = dels = inss = total = 0
    per_utt = []
    for i, (ref, hyp) in enumerate(zip(refs, hyps)):
        ali = edit_distance(ref, hyp)
        matches += ali.matches
        subs += ali.substitutions
        dels += ali.deletions
        inss += ali.insertions
        total += len(ref)
        per_utt.append((ids[i] if ids is not None else str(i), ali.distance, len(ref)))
    return MetricResult(
        name=name,
        matches=matches,
        substitutions=subs,
        deletions=dels,
        insertions=inss,
        ref_tokens=total,
        per_utterance=tuple(per_utt),
    )


def ser(
    refs: Sequence[Sequence[str]],
    hyps: Sequence[Sequence[str]],
    ids: Sequence[str] | None = None,
) -> MetricResult:
    """Syllable error rate over parallel token sequences."""
    return _pooled("ser", refs, hyps, ids)


def sher(
    refs: Sequence[Sequence[str]],
    hyps: Sequence[Sequence[str]],
    index: HomonymClassIndex,
    ids: Sequence[str] | None = None,
) -> MetricResult:
    """Syllable homonym error rate.

    Both sides are mapped to homonym-class representatives before
    alignment, so syllables indistinguishable under the index's knowledge
    source never count as errors.
    """
    name = f"sher[{index.ks}]"
    crefs = [index.canonicalize(r) for r in refs]
    chyps = [index.canonicalize(h) for h in hyps]
    return _pooled(name, crefs, chyps, ids)


def _attribute_tokens(
    lexicon: Lexicon, syllables: Sequence[str], ks: KnowledgeSource
) -> list[Hashable]:
    toks: list[Hashable] = []
    for syl in syllables:
        toks.extend(syllable_to_attributes(lexicon, syl, ks))
    return toks


def prer(
    refs: Sequence[Sequence[str]],
    hyps: Sequence[Sequence[str]],
    lexicon: Lexicon,
    ks: KnowledgeSource,
    ids: Sequence[str] | None = None,
) -> MetricResult:
    """Pronunciation error rate over attribute tokens.

    Syllable sequences on both sides are expanded to attribute tokens
    under the knowledge source: one value token per segment for a single
    category (height and backness only where present), one value tuple
    per segment for a multi-category source.
    """
    name = f"prer[{ks}]"
    arefs = [_attribute_tokens(lexicon, r, ks) for r in refs]
    ahyps = [_attribute_tokens(lexicon, h, ks) for h in hyps]
    return _pooled(name, arefs, ahyps, ids)


def prer_from_attributes(
    refs: Sequence[Sequence[str]],
    attr_hyps: Sequence[Sequence[str]],
    lexicon: Lexicon,
    ks: KnowledgeSource,
    ids: Sequence[str] | None = None,
) -> MetricResult:
    """Pronunciation error rate against hypotheses that are already
    attribute-value sequences (single category only)."""
    if len(ks) != 1:
        raise ValueError(
            "attribute-sequence hypotheses are single-category; got "
            f"{ks}"
        )
    name = f"prer[{ks}]"
    arefs = [_attribute_tokens(lexicon, r, ks) for r in refs]
    return _pooled(name, arefs, [list(h) for h in attr_hyps], ids)


@dataclass(frozen=True)
class ScoreReport:
    """A bundle of metric results with text and machine renderings."""

    results: tuple[MetricResult, ...]

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            lines.append(
                f"{r.name}: {r.rate:.6f} "
                f"({r.errors} edits / {r.ref_tokens} tokens; "
                f"sub {r.substitutions}, del {r.deletions}, ins {r.insertions})"
            )
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        return "".join(f"{r.name}\t{r.rate:.6f}\n" for r in self.results)


def read_corpus(text: str) -> list[tuple[str, tuple[str, ...]]]:
    """Parse utterance lines of the form ``utt_id<TAB>tok tok ...``."""
    out: list[tuple[str, tuple[str, ...]]] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if "\t" not in line:
            raise FormatError(f"line {lineno}: expected utt_id<TAB>tokens")
        utt_id, rest = line.split("\t", 1)
        utt_id = utt_id.strip()
        toks = tuple(rest.split())
        if not utt_id or any(ch.isspace() for ch in utt_id):
            raise FormatError(f"line {lineno}: bad utterance id {utt_id!r}")
        if utt_id in seen:
            raise FormatError(f"line {lineno}: duplicate utterance id {utt_id!r}")
        if not toks:
            raise FormatError(f"line {lineno}: utterance {utt_id!r} has no tokens")
        seen.add(utt_id)
        out.append((utt_id, toks))
    return out


def write_corpus(pairs: Iterable[tuple[str, Sequence[str]]]) -> str:
    return "".join(f"{utt}\t{' '.join(toks)}\n" for utt, toks in pairs)


def pair_by_id(
    refs: Sequence[tuple[str, Sequence[str]]],
    hyps: Sequence[tuple[str, Sequence[str]]],
) -> tuple[list[str], list[Sequence[str]], list[Sequence[str]]]:
    """Match two id-keyed corpora, in reference order."""
    hyp_map: Mapping[str, Sequence[str]] = dict(hyps)
    missing = [utt for utt, _ in refs if utt not in hyp_map]
    if missing:
        raise FormatError(f"hypotheses missing for: {' '.join(missing[:5])}")
    extra = set(hyp_map) - {utt for utt, _ in refs}
    if extra:
        raise FormatError(f"hypotheses for unknown ids: {' '.join(sorted(extra)[:5])}")
    ids = [utt for utt, _ in refs]
    return ids, [toks for _, toks in refs], [hyp_map[utt] for utt in ids]
