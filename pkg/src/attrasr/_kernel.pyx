# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled decode/alignment kernels.

Structural twin of _kernel_py.py: same accumulation order, same zero
skipping, same tie handling, so that both backends agree bit for bit.
Keep any change in sync with the pure-Python file.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

BACKEND = "compiled"

MATCH, SUB, DEL, INS = 0, 1, 2, 3


def levenshtein(ref, hyp):
    """Edit distance with a deterministic backtrace.

    Returns (ops, n_match, n_sub, n_del, n_ins) where ops is a uint8 array
    of move codes from sequence start to end.  Ties prefer match, then
    substitution, then deletion, then insertion.
    """
    cdef cnp.int64_t[::1] r = np.ascontiguousarray(ref, dtype=np.int64)
    cdef cnp.int64_t[::1] h = np.ascontiguousarray(hyp, dtype=np.int64)
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t m = h.shape[0]
    cdef cnp.ndarray[cnp.int32_t, ndim=2] dist = np.zeros((n + 1, m + 1), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] d = dist
    cdef Py_ssize_t i, j
    cdef int best, cand
    for j in range(m + 1):
        d[0, j] = <cnp.int32_t> j
    for i in range(n + 1):
        d[i, 0] = <cnp.int32_t> i
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            best = d[i - 1, j - 1] + (0 if r[i - 1] == h[j - 1] else 1)
            cand = d[i - 1, j] + 1
            if cand < best:
                best = cand
            cand = d[i, j - 1] + 1
            if cand < best:
                best = cand
            d[i, j] = best
    ops_rev = []
    cdef int n_match = 0, n_sub = 0, n_del = 0, n_ins = 0
    i = n
    j = m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and r[i - 1] == h[j - 1] and d[i, j] == d[i - 1, j - 1]:
            ops_rev.append(MATCH)
            n_match += 1
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and d[i, j] == d[i - 1, j - 1] + 1:
            ops_rev.append(SUB)
            n_sub += 1
            i -= 1
            j -= 1
        elif i > 0 and d[i, j] == d[i - 1, j] + 1:
            ops_rev.append(DEL)
            n_del += 1
            i -= 1
        else:
            ops_rev.append(INS)
            n_ins += 1
            j -= 1
    ops_rev.reverse()
    return np.asarray(ops_rev, dtype=np.uint8), n_match, n_sub, n_del, n_ins


cdef double _lm_query(const cnp.int64_t[::1] keys,
                      const cnp.float64_t[::1] logp,
                      const cnp.int64_t[::1] nxt,
                      const cnp.float64_t[::1] bow,
                      const cnp.int64_t[::1] parent,
                      cnp.int64_t n_words,
                      cnp.int64_t state,
                      cnp.int64_t word,
                      cnp.int64_t* next_state):
    cdef double acc = 0.0
    cdef cnp.int64_t key
    cdef Py_ssize_t lo, hi, mid
    cdef Py_ssize_t size = keys.shape[0]
    while True:
        key = state * n_words + word
        lo = 0
        hi = size
        while lo < hi:
            mid = (lo + hi) // 2
            if keys[mid] < key:
                lo = mid + 1
            else:
                hi = mid
        if lo < size and keys[lo] == key:
            next_state[0] = nxt[lo]
            return acc + logp[lo]
        acc += bow[state]
        state = parent[state]


def lm_query(lm_keys, lm_logp, lm_next, lm_bow, lm_parent, n_words, state, word):
    """Back-off chain lookup on the integerized LM automaton."""
    cdef cnp.int64_t nst = 0
    cdef double lp = _lm_query(lm_keys, lm_logp, lm_next, lm_bow, lm_parent,
                               n_words, state, word, &nst)
    return lp, int(nst)


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
    cdef cnp.int64_t[::1] bseq = beam_seq
    cdef cnp.int64_t[::1] bnode = beam_node
    cdef cnp.float64_t[::1] bpb = beam_pb
    cdef cnp.float64_t[::1] bpnb = beam_pnb
    cdef cnp.float64_t[::1] scores = label_scores
    cdef double blank = blank_score
    cdef cnp.int64_t[::1] cstart = child_start
    cdef cnp.int64_t[::1] clabel = child_label
    cdef cnp.int64_t[::1] cnode = child_node
    cdef cnp.int64_t[::1] inlab = node_in_label
    cdef cnp.int64_t[::1] tstart = term_start
    cdef cnp.int64_t[::1] tsyl = term_syl

    cdef bint has_lm = lm_keys is not None
    cdef cnp.int64_t[::1] lkeys = None
    cdef cnp.float64_t[::1] llogp = None
    cdef cnp.int64_t[::1] lnext = None
    cdef cnp.float64_t[::1] lbow = None
    cdef cnp.int64_t[::1] lparent = None
    cdef cnp.int64_t[::1] sword = None
    cdef cnp.int64_t lwords = 0
    if has_lm:
        lkeys = lm_keys
        llogp = lm_logp
        lnext = lm_next
        lbow = lm_bow
        lparent = lm_parent
        sword = syl_word
        lwords = lm_n_words
    cdef double scale = lm_scale
    cdef double bon = bonus

    cdef cnp.int64_t n_nodes = inlab.shape[0]
    cand = {}
    out_seq = []
    out_node = []
    out_pb = []
    out_pnb = []

    cdef Py_ssize_t root_lo = cstart[0]
    cdef Py_ssize_t root_hi = cstart[1]

    cdef Py_ssize_t b, e, t
    cdef cnp.int64_t sq, nd, inl, lab, syl, sid, key, nst
    cdef double pb, pnb, tot, stay_pb, stay_pnb, mass, val, mult, lp10
    cdef object slot, ik

    for b in range(bseq.shape[0]):
        sq = bseq[b]
        nd = bnode[b]
        pb = bpb[b]
        pnb = bpnb[b]
        tot = pb + pnb
        inl = inlab[nd]

        # stay put: blank after anything, or stretch the incoming label
        stay_pb = tot * blank
        stay_pnb = pnb * scores[inl] if inl >= 0 else 0.0
        if stay_pb != 0.0 or stay_pnb != 0.0:
            key = sq * n_nodes + nd
            slot = cand.get(key)
            if slot is None:
                cand[key] = len(out_seq)
                out_seq.append(sq)
                out_node.append(nd)
                out_pb.append(stay_pb)
                out_pnb.append(stay_pnb)
            else:
                out_pb[<Py_ssize_t> slot] += stay_pb
                out_pnb[<Py_ssize_t> slot] += stay_pnb

        # advance deeper into the trie
        for e in range(cstart[nd], cstart[nd + 1]):
            lab = clabel[e]
            mass = pb if lab == inl else tot
            if mass == 0.0:
                continue
            val = mass * scores[lab]
            if val == 0.0:
                continue
            key = sq * n_nodes + cnode[e]
            slot = cand.get(key)
            if slot is None:
                cand[key] = len(out_seq)
                out_seq.append(sq)
                out_node.append(cnode[e])
                out_pb.append(0.0)
                out_pnb.append(val)
            else:
                out_pnb[<Py_ssize_t> slot] += val

        # commit finished syllables, re-entering at root children
        if tot != 0.0:
            for t in range(tstart[nd], tstart[nd + 1]):
                syl = tsyl[t]
                ik = (int(sq), int(syl))
                slot = seq_intern.get(ik)
                if slot is None:
                    if has_lm:
                        lp10 = _lm_query(lkeys, llogp, lnext, lbow, lparent,
                                         lwords, seq_lm_state[sq], sword[syl], &nst)
                    else:
                        lp10 = 0.0
                        nst = 0
                    sid = len(seq_parent)
                    seq_intern[ik] = sid
                    seq_parent.append(int(sq))
                    seq_syl.append(int(syl))
                    seq_lm_state.append(int(nst))
                    seq_lm10.append(seq_lm10[sq] + lp10)
                    seq_mult.append(exp(scale * lp10 + bon))
                else:
                    sid = <cnp.int64_t> slot
                mult = seq_mult[sid]
                for e in range(root_lo, root_hi):
                    lab = clabel[e]
                    mass = pb if lab == inl else tot
                    if mass == 0.0:
                        continue
                    val = mass * scores[lab] * mult
                    if val == 0.0:
                        continue
                    key = sid * n_nodes + cnode[e]
                    slot = cand.get(key)
                    if slot is None:
                        cand[key] = len(out_seq)
                        out_seq.append(sid)
                        out_node.append(cnode[e])
                        out_pb.append(0.0)
                        out_pnb.append(val)
                    else:
                        out_pnb[<Py_ssize_t> slot] += val

    return (
        np.asarray(out_seq, dtype=np.int64),
        np.asarray(out_node, dtype=np.int64),
        np.asarray(out_pb, dtype=np.float64),
        np.asarray(out_pnb, dtype=np.float64),
    )
