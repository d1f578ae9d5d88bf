"""Attribute-to-syllable decoding.

Posterior streams for the categories of a knowledge source are combined
(conditional independence, so joint scores are per-category products) and
searched with a trie-constrained CTC prefix beam: hypotheses are pairs of
a committed syllable sequence and a position inside the pronunciation
trie, each carrying separate blank / non-blank probability mass.  An
optional n-gram model over syllables is applied at commit time together
with a constant insertion bonus.

The per-frame expansion runs in a swappable kernel (compiled or pure
Python); pruning, rescaling, and tie ordering live here so both backends
share them and return identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import kernels
from .errors import DecodeFailure, FormatError
from .inventory import Category, KnowledgeSource, parse_knowledge_source
from .lexicon import Lexicon, ProjectedTuple, project_syllable
from .lm import LN10, LmAutomaton, NGramModel, build_automaton
from .posteriors import (
    BLANK_INDEX,
    PosteriorSet,
    absent_index,
    class_labels,
    value_index,
)


def ctc_collapse(ids: Sequence[int], drop: frozenset[int] = frozenset((BLANK_INDEX,))) -> list[int]:
    """Collapse repeated frame labels, then remove blank-like classes."""
    out: list[int] = []
    prev = -1
    for i in ids:
        i = int(i)
        if i != prev:
            if i not in drop:
                out.append(i)
            prev = i
    return out


def decode_attribute_sequence(
    ps: PosteriorSet, ks: Union[KnowledgeSource, str]
) -> dict[Category, tuple[str, ...]]:
    """Per-category greedy CTC decode: frame argmax, collapse, drop blanks.

    Height and backness also drop their consonant (absent) class, so the
    result is the sequence of attribute values actually carried.
    """
    if isinstance(ks, str):
        ks = parse_knowledge_source(ks)
    if not ps.has_categories(ks):
        raise FormatError(
            f"utterance {ps.utterance_id!r} lacks streams for {ks}"
        )
    out: dict[Category, tuple[str, ...]] = {}
    for cat in ks:
        drop = {BLANK_INDEX}
        if cat in (Category.HEIGHT, Category.BACKNESS):
            drop.add(absent_index(cat))
        ids = np.argmax(ps.streams[cat].probs, axis=1)
        labels = class_labels(cat)
        out[cat] = tuple(labels[i] for i in ctc_collapse(ids, frozenset(drop)))
    return out


@dataclass(frozen=True)
class IntegratedFrames:
    """Joint view of one utterance's streams under a knowledge source.

    Joint class scores are products of per-category posteriors, taken in
    canonical category order; the all-blank product plays the role of the
    CTC blank.
    """

    utterance_id: str
    ks: KnowledgeSource
    mats: tuple[np.ndarray, ...]  # per category of ks, (frames, n_classes)

    @property
    def frame_count(self) -> int:
        return int(self.mats[0].shape[0])

    def category_marginal(self, category: Category) -> np.ndarray:
        for cat, mat in zip(self.ks, self.mats):
            if cat is category:
                return mat
        raise ValueError(f"{category} is not part of {self.ks}")

    def blank_scores(self) -> np.ndarray:
        out = np.ones(self.frame_count, dtype=np.float64)
        for mat in self.mats:
            out = out * mat[:, BLANK_INDEX]
        return out

    def tuple_scores(self, columns: np.ndarray) -> np.ndarray:
        """Scores for joint classes given per-category column indices.

        columns has shape (n_labels, n_categories); the result has shape
        (frames, n_labels).
        """
        columns = np.asarray(columns, dtype=np.int64)
        if columns.ndim != 2 or columns.shape[1] != len(self.mats):
            raise ValueError(
                f"columns must be (n_labels, {len(self.mats)}), got {columns.shape}"
            )
        out = np.ones((self.frame_count, columns.shape[0]), dtype=np.float64)
        for ci in range(columns.shape[1]):
            out *= self.mats[ci][:, columns[:, ci]]
        return out


def integrate_streams(
    ps: PosteriorSet, ks: Union[KnowledgeSource, str]
) -> IntegratedFrames:
    if isinstance(ks, str):
        ks = parse_knowledge_source(ks)
    if not ps.has_categories(ks):
        raise FormatError(f"utterance {ps.utterance_id!r} lacks streams for {ks}")
    mats = tuple(ps.streams[cat].probs for cat in ks)
    return IntegratedFrames(utterance_id=ps.utterance_id, ks=ks, mats=mats)


@dataclass
class DecodeContext:
    """Everything fixed across utterances for one (lexicon, ks, lm) setup.

    The pronunciation trie is stored CSR-style: node 0 is the root,
    children are sorted by joint-label id, and each node knows which label
    its incoming edge consumed.  Contexts pickle cleanly, so they can be
    shipped to worker processes once and reused.
    """

    ks: KnowledgeSource
    syllables: tuple[str, ...]
    labels: tuple[ProjectedTuple, ...]
    label_columns: np.ndarray  # (n_labels, len(ks)) int64
    child_start: np.ndarray
    child_label: np.ndarray
    child_node: np.ndarray
    node_in_label: np.ndarray
    term_start: np.ndarray
    term_syl: np.ndarray
    node_paths: tuple[tuple[int, ...], ...]
    lm: Optional[LmAutomaton]
    syl_word: Optional[np.ndarray]

    @property
    def n_nodes(self) -> int:
        return int(self.node_in_label.shape[0])


def build_decode_context(
    lexicon: Lexicon,
    ks: Union[KnowledgeSource, str],
    lm: Union[NGramModel, LmAutomaton, None] = None,
) -> DecodeContext:
    if isinstance(ks, str):
        ks = parse_knowledge_source(ks)

    label_ids: dict[ProjectedTuple, int] = {}
    in_label: list[int] = [-1]
    paths: list[tuple[int, ...]] = [()]
    children: list[dict[int, int]] = [{}]
    terms: dict[int, list[int]] = {}

    for sid, entry in enumerate(lexicon.entries):
        node = 0
        for tup in project_syllable(lexicon, entry.syllable, ks):
            lab = label_ids.setdefault(tup, len(label_ids))
            nxt = children[node].get(lab)
            if nxt is None:
                nxt = len(in_label)
                children[node][lab] = nxt
                in_label.append(lab)
                paths.append(paths[node] + (lab,))
                children.append({})
            node = nxt
        terms.setdefault(node, []).append(sid)

    syllables = lexicon.labels
    n_nodes = len(in_label)
    child_start = np.zeros(n_nodes + 1, dtype=np.int64)
    child_label: list[int] = []
    child_node: list[int] = []
    term_start = np.zeros(n_nodes + 1, dtype=np.int64)
    term_syl: list[int] = []
    for node in range(n_nodes):
        for lab in sorted(children[node]):
            child_label.append(lab)
            child_node.append(children[node][lab])
        child_start[node + 1] = len(child_label)
        for sid in sorted(terms.get(node, ()), key=lambda s: syllables[s]):
            term_syl.append(sid)
        term_start[node + 1] = len(term_syl)

    labels = tuple(label_ids)
    columns = np.zeros((len(labels), len(ks)), dtype=np.int64)
    for li, tup in enumerate(labels):
        for ci, cat in enumerate(ks):
            columns[li, ci] = value_index(cat, tup[ci])

    automaton: Optional[LmAutomaton] = None
    syl_word: Optional[np.ndarray] = None
    if lm is not None:
        automaton = lm if isinstance(lm, LmAutomaton) else build_automaton(lm)
        syl_word = np.asarray(
            [automaton.word_index.get(label, automaton.unk) for label in syllables],
            dtype=np.int64,
        )

    return DecodeContext(
        ks=ks,
        syllables=syllables,
        labels=labels,
        label_columns=columns,
        child_start=child_start,
        child_label=np.asarray(child_label, dtype=np.int64),
        child_node=np.asarray(child_node, dtype=np.int64),
        node_in_label=np.asarray(in_label, dtype=np.int64),
        term_start=term_start,
        term_syl=np.asarray(term_syl, dtype=np.int64),
        node_paths=tuple(paths),
        lm=automaton,
        syl_word=syl_word,
    )


@dataclass(frozen=True)
class Hypothesis:
    """One complete decode, with its combined and component scores.

    score = acoustic + lm_weight * ln(10) * lm_log10 + bonus * len; all
    natural-log except lm_log10, which stays in the model's log10 domain.
    """

    syllables: tuple[str, ...]
    score: float
    acoustic: float
    lm_log10: float


@dataclass(frozen=True)
class NBestList:
    utterance_id: str
    hypotheses: tuple[Hypothesis, ...]

    @property
    def best(self) -> Hypothesis:
        return self.hypotheses[0]


def _prune(
    cand: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    beam_width: int,
    seq_labels: Callable[[int], tuple[str, ...]],
    node_paths: Sequence[tuple[int, ...]],
):
    """Keep the heaviest states, rescaled so the best has mass one.

    The surviving order is fully deterministic: mass descending, and runs
    of exactly equal mass ordered by (committed labels, trie path).  That
    order fixes both the cut and the accumulation order next frame, which
    is what lets the two kernel backends agree bitwise.
    """
    cseq, cnode, cpb, cpnb = cand
    tot = cpb + cpnb
    keep = np.nonzero(tot > 0.0)[0]
    if keep.size == 0:
        return None
    tot = tot[keep]
    order = np.argsort(-tot, kind="stable")
    stot = tot[order]
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(stot) and stot[j] == stot[i]:
            j += 1
        if j - i > 1:
            run = sorted(
                order[i:j],
                key=lambda k: (
                    seq_labels(int(cseq[keep[k]])),
                    node_paths[int(cnode[keep[k]])],
                ),
            )
            order[i:j] = run
        i = j
    order = order[:beam_width]
    sel = keep[order]
    scale = float(tot[order[0]])
    return (
        np.ascontiguousarray(cseq[sel]),
        np.ascontiguousarray(cnode[sel]),
        np.ascontiguousarray(cpb[sel] / scale),
        np.ascontiguousarray(cpnb[sel] / scale),
        scale,
    )


def beam_decode(
    ps: PosteriorSet,
    ks: Union[KnowledgeSource, str],
    lexicon: Union[Lexicon, DecodeContext],
    lm: Union[NGramModel, LmAutomaton, None] = None,
    *,
    beam_width: int = 16,
    lm_weight: float = 0.5,
    insertion_bonus: float = 0.0,
    nbest: int = 10,
    kernel=None,
) -> NBestList:
    """Trie-constrained prefix beam search over one utterance.

    lexicon may be a prebuilt DecodeContext (then lm must be None; the
    context already carries its model).  Raises DecodeFailure when no
    complete hypothesis survives.
    """
    if isinstance(ks, str):
        ks = parse_knowledge_source(ks)
    if isinstance(lexicon, DecodeContext):
        if lm is not None:
            raise ValueError("pass the lm when building the DecodeContext")
        if lexicon.ks != ks:
            raise ValueError(f"context built for {lexicon.ks}, asked for {ks}")
        ctx = lexicon
    else:
        ctx = build_decode_context(lexicon, ks, lm)
    if beam_width < 1:
        raise ValueError("beam width must be at least 1")
    if nbest < 1:
        raise ValueError("nbest must be at least 1")
    krn = kernels.get_backend(None) if kernel is None else kernels.get_backend(kernel)

    integ = integrate_streams(ps, ctx.ks)
    scores = np.ascontiguousarray(integ.tuple_scores(ctx.label_columns))
    blanks = integ.blank_scores()

    lm_auto = ctx.lm
    lm_scale = lm_weight * LN10
    seq_parent: list[int] = [-1]
    seq_syl: list[int] = [-1]
    seq_lm_state: list[int] = [int(lm_auto.initial) if lm_auto is not None else 0]
    seq_lm10: list[float] = [0.0]
    seq_mult: list[float] = [1.0]
    seq_intern: dict[tuple[int, int], int] = {}
    label_cache: dict[int, tuple[str, ...]] = {0: ()}

    def seq_labels(sid: int) -> tuple[str, ...]:
        got = label_cache.get(sid)
        if got is None:
            got = seq_labels(seq_parent[sid]) + (ctx.syllables[seq_syl[sid]],)
            label_cache[sid] = got
        return got

    if lm_auto is not None:
        lm_args = (
            lm_auto.keys, lm_auto.logp, lm_auto.next_state,
            lm_auto.bow, lm_auto.parent, lm_auto.n_words,
        )
    else:
        lm_args = (None, None, None, None, None, 0)

    beam_seq = np.zeros(1, dtype=np.int64)
    beam_node = np.zeros(1, dtype=np.int64)
    beam_pb = np.ones(1, dtype=np.float64)
    beam_pnb = np.zeros(1, dtype=np.float64)
    log_scale = 0.0

    for t in range(integ.frame_count):
        cand = krn.expand_frame(
            beam_seq, beam_node, beam_pb, beam_pnb,
            scores[t], float(blanks[t]),
            ctx.child_start, ctx.child_label, ctx.child_node,
            ctx.node_in_label, ctx.term_start, ctx.term_syl,
            seq_parent, seq_syl, seq_lm_state, seq_lm10, seq_mult, seq_intern,
            ctx.syl_word, *lm_args, lm_scale, insertion_bonus,
        )
        pruned = _prune(cand, beam_width, seq_labels, ctx.node_paths)
        if pruned is None:
            raise DecodeFailure(
                ps.utterance_id, f"no surviving hypotheses at frame {t}"
            )
        beam_seq, beam_node, beam_pb, beam_pnb, scale = pruned
        log_scale += math.log(scale)

    results: list[Hypothesis] = []
    for b in range(len(beam_seq)):
        sq = int(beam_seq[b])
        nd = int(beam_node[b])
        base = math.log(float(beam_pb[b]) + float(beam_pnb[b])) + log_scale
        if nd == 0:
            # never left the root: the empty sequence, complete by definition
            lp10e = (
                lm_auto.query(seq_lm_state[sq], lm_auto.eos)[0]
                if lm_auto is not None
                else 0.0
            )
            results.append(Hypothesis(
                syllables=(),
                score=base + lm_scale * lp10e,
                acoustic=base,
                lm_log10=lp10e,
            ))
            continue
        prev_labels = seq_labels(sq)
        for t in range(int(ctx.term_start[nd]), int(ctx.term_start[nd + 1])):
            sid = int(ctx.term_syl[t])
            if lm_auto is not None:
                lp10, nst = lm_auto.query(seq_lm_state[sq], int(ctx.syl_word[sid]))
                lp10e = lm_auto.query(nst, lm_auto.eos)[0]
            else:
                lp10 = lp10e = 0.0
            count = len(prev_labels) + 1
            combined = base + lm_scale * (lp10 + lp10e) + insertion_bonus
            acoustic = (
                base - lm_scale * seq_lm10[sq] - insertion_bonus * (count - 1)
            )
            results.append(Hypothesis(
                syllables=prev_labels + (ctx.syllables[sid],),
                score=combined,
                acoustic=acoustic,
                lm_log10=seq_lm10[sq] + lp10 + lp10e,
            ))
    if not results:
        raise DecodeFailure(
            ps.utterance_id, "beam ended with no complete hypothesis"
        )
    results.sort(key=lambda h: (-h.score, h.syllables))
    return NBestList(utterance_id=ps.utterance_id, hypotheses=tuple(results[:nbest]))


def rescore_nbest(
    nbest_list: NBestList,
    lm: NGramModel,
    lm_weight: float = 0.5,
    insertion_bonus: float = 0.0,
) -> NBestList:
    """Re-rank hypotheses with a (different) model applied to the stored
    acoustic scores."""
    rescored = []
    for hyp in nbest_list.hypotheses:
        lm10 = lm.score(hyp.syllables) / LN10
        score = (
            hyp.acoustic + lm_weight * LN10 * lm10
            + insertion_bonus * len(hyp.syllables)
        )
        rescored.append(Hypothesis(
            syllables=hyp.syllables, score=score,
            acoustic=hyp.acoustic, lm_log10=lm10,
        ))
    rescored.sort(key=lambda h: (-h.score, h.syllables))
    return NBestList(nbest_list.utterance_id, tuple(rescored))


_WORKER_STATE: dict = {}


def _init_worker(ctx: DecodeContext, params: dict) -> None:
    _WORKER_STATE["ctx"] = ctx
    _WORKER_STATE["params"] = params


def _decode_task(ps: PosteriorSet) -> NBestList:
    ctx = _WORKER_STATE["ctx"]
    return beam_decode(ps, ctx.ks, ctx, **_WORKER_STATE["params"])


def decode_corpus(
    sets: Sequence[PosteriorSet],
    ctx: DecodeContext,
    *,
    beam_width: int = 16,
    lm_weight: float = 0.5,
    insertion_bonus: float = 0.0,
    nbest: int = 10,
    jobs: int = 1,
    kernel=None,
) -> list[NBestList]:
    """Decode many utterances, optionally across worker processes.

    Results keep input order.  With jobs > 1 each worker uses its own
    default kernel backend, so a kernel override only applies to jobs=1.
    """
    params = dict(
        beam_width=beam_width, lm_weight=lm_weight,
        insertion_bonus=insertion_bonus, nbest=nbest,
    )
    if jobs <= 1 or len(sets) <= 1:
        return [
            beam_decode(ps, ctx.ks, ctx, kernel=kernel, **params) for ps in sets
        ]
    with ProcessPoolExecutor(
        max_workers=jobs, initializer=_init_worker, initargs=(ctx, params)
    ) as pool:
        return list(pool.map(_decode_task, sets))
