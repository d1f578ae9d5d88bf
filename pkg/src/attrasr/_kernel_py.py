"""Pure-Python decode/alignment kernels.

This is the fallback twin of the compiled extension _kernel.pyx.  The two
must stay structurally identical: same accumulation order, same zero
skipping, same tie handling, so that results agree bit for bit.  Keep any
change in sync with the .pyx file.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

MATCH, SUB, DEL, INS = 0, 1, 2, 3


def levenshtein(ref, hyp):
    """Edit distance with a deterministic backtrace.

    Returns (ops, n_match, n_sub, n_del, n_ins) where ops is a uint8 array
    of move codes from sequence start to end.  Ties prefer match, then
    substitution, then deletion, then insertion.
    """
    ref = np.asarray(ref, dtype=np.int64)
    hyp = np.asarray(hyp, dtype=np.int64)
    n, m = len(ref), len(hyp)
    dist = np.zeros((n + 1, m + 1), dtype=np.int32)
    dist[0, :] = np.arange(m + 1)
    dist[:, 0] = np.arange(n + 1)
    for i in range(1, n + 1):
        sub_cost = (hyp != ref[i - 1]).astype(np.int32)
        row_prev = dist[i - 1]
        row = dist[i]
        for j in range(1, m + 1):
            best = row_prev[j - 1] + sub_cost[j - 1]
            if row_prev[j] + 1 < best:
                best = row_prev[j] + 1
            if row[j - 1] + 1 < best:
                best = row[j - 1] + 1
            row[j] = best
    ops = []
    i, j = n, m
    n_match = n_sub = n_del = n_ins = 0
    while i > 0 or j > 0:
        if (
            i > 0 and j > 0
            and ref[i - 1] == hyp[j - 1]
            and dist[i, j] == dist[i - 1, j - 1]
        ):
            ops.append(MATCH)
            n_match += 1
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and dist[i, j] == dist[i - 1, j - 1] + 1:
            ops.append(SUB)
            n_sub += 1
            i -= 1
            j -= 1
        elif i > 0 and dist[i, j] == dist[i - 1, j] + 1:
            ops.append(DEL)
            n_del += 1
            i -= 1
        else:
            ops.append(INS)
            n_ins += 1
            j -= 1
    ops.reverse()
    return np.asarray(ops, dtype=np.uint8), n_match, n_sub, n_del, n_ins


def lm_query(lm_keys, lm_logp, lm_next, lm_bow, lm_parent, n_words, state, word):
    """Back-off chain lookup on the integerized LM automaton."""
    acc = 0.0
    size = len(lm_keys)
    while True:
        key = state * n_words + word
        i = int(np.searchsorted(lm_keys, key))
        if i < size and lm_keys[i] == key:
            return acc + float(lm_logp[i]), int(lm_next[i])
        acc += float(lm_bow[state])
        state = int(lm_parent[state])


def expand_frame(
    beam_seq,
    beam_node,
    beam_pb,
    beam_pnb,
    label_scores,
    blank_score,
    child_start,
    child_label,
    child_node,
    node_in_label,
    term_start,
    term_syl,
    seq_parent,
    seq_syl,
    seq_lm_state,
    seq_lm10,
    seq_mult,
    seq_intern,
    syl_word,
    lm_keys,
    lm_logp,
    lm_next,
    lm_bow,
    lm_parent,
    lm_n_words,
    lm_scale,
    bonus,
):
    """One frame of trie-constrained CTC prefix beam expansion.

    Beam states are (sequence id, trie node) with separate blank/non-blank
    mass.  Emissions advance within the trie; at terminal nodes a syllable
    is committed and the walk re-enters at a root child, with the language
    model weight and insertion bonus folded into the committed mass.  Zero
    contributions never create or touch candidate slots.
    """
    n_nodes = len(node_in_label)
    cand: dict[int, int] = {}
    out_seq: list[int] = []
    out_node: list[int] = []
    out_pb: list[float] = []
    out_pnb: list[float] = []

    root_lo = int(child_start[0])
    root_hi = int(child_start[1])

    for b in range(len(beam_seq)):
        sq = int(beam_seq[b])
        nd = int(beam_node[b])
        pb = float(beam_pb[b])
        pnb = float(beam_pnb[b])
        tot = pb + pnb
        inl = int(node_in_label[nd])

        # stay put: blank after anything, or stretch the incoming label
        stay_pb = tot * blank_score
        stay_pnb = pnb * float(label_scores[inl]) if inl >= 0 else 0.0
        if stay_pb != 0.0 or stay_pnb != 0.0:
            key = sq * n_nodes + nd
            s = cand.get(key)
            if s is None:
                s = len(out_seq)
                cand[key] = s
                out_seq.append(sq)
                out_node.append(nd)
                out_pb.append(stay_pb)
                out_pnb.append(stay_pnb)
            else:
                out_pb[s] += stay_pb
                out_pnb[s] += stay_pnb

        # advance deeper into the trie
        for e in range(int(child_start[nd]), int(child_start[nd + 1])):
            lab = int(child_label[e])
            mass = pb if lab == inl else tot
            if mass == 0.0:
                continue
            val = mass * float(label_scores[lab])
            if val == 0.0:
                continue
            key = sq * n_nodes + int(child_node[e])
            s = cand.get(key)
            if s is None:
                s = len(out_seq)
                cand[key] = s
                out_seq.append(sq)
                out_node.append(int(child_node[e]))
                out_pb.append(0.0)
                out_pnb.append(val)
            else:
                out_pnb[s] += val

        # commit finished syllables, re-entering at root children
        if tot != 0.0:
            for t in range(int(term_start[nd]), int(term_start[nd + 1])):
                syl = int(term_syl[t])
                ik = (sq, syl)
                sid = seq_intern.get(ik)
                if sid is None:
                    if lm_keys is not None:
                        lp10, nst = lm_query(
                            lm_keys, lm_logp, lm_next, lm_bow, lm_parent,
                            lm_n_words, seq_lm_state[sq], int(syl_word[syl]),
                        )
                    else:
                        lp10, nst = 0.0, 0
                    sid = len(seq_parent)
                    seq_intern[ik] = sid
                    seq_parent.append(sq)
                    seq_syl.append(syl)
                    seq_lm_state.append(nst)
                    seq_lm10.append(seq_lm10[sq] + lp10)
                    seq_mult.append(math.exp(lm_scale * lp10 + bonus))
                mult = seq_mult[sid]
                for e in range(root_lo, root_hi):
                    lab = int(child_label[e])
                    mass = pb if lab == inl else tot
                    if mass == 0.0:
                        continue
                    val = mass * float(label_scores[lab]) * mult
                    if val == 0.0:
                        continue
                    key = sid * n_nodes + int(child_node[e])
                    s = cand.get(key)
                    if s is None:
                        s = len(out_seq)
                        cand[key] = s
                        out_seq.append(sid)
                        out_node.append(int(child_node[e]))
                        out_pb.append(0.0)
                        out_pnb.append(val)
                    else:
                        out_pnb[s] += val

    return (
        np.asarray(out_seq, dtype=np.int64),
        np.asarray(out_node, dtype=np.int64),
        np.asarray(out_pb, dtype=np.float64),
        np.asarray(out_pnb, dtype=np.float64),
    )
