"""Edit alignments, pooled error rates, and the utterance corpus format."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from attrasr.errors import FormatError
from attrasr.inventory import ALL_CATEGORIES, parse_knowledge_source
from attrasr.lexicon import build_homonym_index
from attrasr.metrics import (
    ScoreReport,
    edit_distance,
    pair_by_id,
    prer,
    prer_from_attributes,
    read_corpus,
    ser,
    sher,
    write_corpus,
)

from .oracles import brute_distance
from .toys import basic_lexicon, random_lexicon


def test_alignment_hand_cases():
    ali = edit_distance("abc", "abc")
    assert ali.ops == ("match", "match", "match")
    assert ali.distance == 0

    ali = edit_distance(["a", "b"], ["a", "x"])
    assert ali.ops == ("match", "sub")
    assert (ali.matches, ali.substitutions) == (1, 1)

    ali = edit_distance(["a", "b"], ["b"])
    assert ali.ops == ("del", "match")

    ali = edit_distance(["a"], ["a", "b"])
    assert ali.ops == ("match", "ins")

    ali = edit_distance([], ["a", "b"])
    assert ali.ops == ("ins", "ins")
    assert ali.distance == 2

    ali = edit_distance(["a", "b"], [])
    assert ali.ops == ("del", "del")


def test_alignment_prefers_substitution_over_del_plus_ins():
    ali = edit_distance(["a", "b", "c"], ["a", "x", "c"])
    assert ali.ops == ("match", "sub", "match")
    # Equal-cost tie between two subs and del+ins resolves to subs.
    ali = edit_distance(["a", "b"], ["x", "y"])
    assert ali.ops == ("sub", "sub")


def _apply(ops, ref, hyp):
    """Replay an alignment; returns the sequence the ops rebuild from ref."""
    out = []
    ri = hi = 0
    for op in ops:
        if op == "match":
            assert ref[ri] == hyp[hi]
            out.append(ref[ri])
            ri += 1
            hi += 1
        elif op == "sub":
            assert ref[ri] != hyp[hi]
            out.append(hyp[hi])
            ri += 1
            hi += 1
        elif op == "del":
            ri += 1
        else:
            out.append(hyp[hi])
            hi += 1
    assert ri == len(ref) and hi == len(hyp)
    return out


token_seq = st.lists(st.sampled_from("abcde"), min_size=0, max_size=12)


@settings(max_examples=100, deadline=None)
@given(token_seq, token_seq)
def test_alignment_matches_brute_force_distance(ref, hyp):
    ali = edit_distance(ref, hyp)
    assert ali.distance == brute_distance(ref, hyp)
    assert ali.matches + ali.substitutions + ali.deletions == len(ref)
    assert ali.matches + ali.substitutions + ali.insertions == len(hyp)
    assert _apply(ali.ops, ref, hyp) == list(hyp)


def test_ser_pools_edits_over_reference_tokens():
    refs = [["a", "b", "c"], ["d", "e"]]
    hyps = [["a", "x", "c"], ["d", "e", "f"]]
    result = ser(refs, hyps, ids=["u1", "u2"])
    assert result.name == "ser"
    assert result.errors == 2 and result.ref_tokens == 5
    assert result.rate == pytest.approx(0.4)
    assert result.per_utterance == (("u1", 1, 3), ("u2", 1, 2))
    assert (result.substitutions, result.deletions, result.insertions) == (1, 0, 1)


def test_rate_is_unclamped_and_guards_empty_reference():
    result = ser([["a"]], [["x", "y", "z"]])
    assert result.rate == pytest.approx(3.0)
    with pytest.raises(ValueError, match="empty reference"):
        ser([[]], [[]]).rate
    with pytest.raises(ValueError, match="references vs"):
        ser([["a"]], [])


def test_sher_canonicalizes_both_sides():
    lex = basic_lexicon()
    index = build_homonym_index(lex, parse_knowledge_source("M+P+A+H+B"))
    refs = [["ta", "an"]]
    hyps = [["da", "an"]]
    assert ser(refs, hyps).rate == pytest.approx(0.5)
    result = sher(refs, hyps, index)
    assert result.name == "sher[M+P+A+H+B]"
    assert result.rate == 0.0

    strict = build_homonym_index(lex, ALL_CATEGORIES)
    assert sher(refs, hyps, strict).rate == pytest.approx(0.5)


def test_prer_multi_category_uses_segment_tuples():
    lex = basic_lexicon()
    refs = [["da"]]
    hyps = [["ta"]]
    # Same manner/place everywhere: no pronunciation error.
    assert prer(refs, hyps, lex, parse_knowledge_source("M+P")).rate == 0.0
    # Voicing included: the initial consonant tuple differs, 1 sub / 2 segments.
    result = prer(refs, hyps, lex, parse_knowledge_source("M+P+V"))
    assert result.name == "prer[M+P+V]"
    assert result.rate == pytest.approx(0.5)
    assert result.substitutions == 1


def test_prer_single_category_flattens_and_drops_absent():
    lex = basic_lexicon()
    h = parse_knowledge_source("H")
    # "dan" carries one height token (the vowel), "i" one.
    result = prer([["dan"]], [["i"]], lex, h)
    assert result.ref_tokens == 1
    assert result.rate == pytest.approx(1.0)  # low vs high
    # Different token counts under M: dan has 3 manner tokens, i has 1.
    m = parse_knowledge_source("M")
    result = prer([["dan"]], [["i"]], lex, m)
    assert result.ref_tokens == 3
    assert result.errors == 2


def test_prer_from_attribute_hypotheses():
    lex = basic_lexicon()
    m = parse_knowledge_source("M")
    result = prer_from_attributes([["da"]], [["stop", "vowel"]], lex, m)
    assert result.rate == 0.0
    result = prer_from_attributes([["da"]], [["nasal", "vowel"]], lex, m)
    assert result.rate == pytest.approx(0.5)
    with pytest.raises(ValueError, match="single-category"):
        prer_from_attributes([["da"]], [["stop"]], lex, parse_knowledge_source("M+P"))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_sher_never_exceeds_ser(seed):
    rng = np.random.default_rng(seed)
    lex = random_lexicon(rng, int(rng.integers(4, 14)))
    labels = lex.labels
    ks = parse_knowledge_source("M+P")
    index = build_homonym_index(lex, ks)
    refs = [
        [labels[int(rng.integers(len(labels)))] for _ in range(int(rng.integers(1, 8)))]
        for _ in range(3)
    ]
    hyps = [
        [labels[int(rng.integers(len(labels)))] for _ in range(int(rng.integers(0, 8)))]
        for _ in range(3)
    ]
    assert sher(refs, hyps, index).errors <= ser(refs, hyps).errors


def test_score_report_renderings():
    result = ser([["a", "b"]], [["a", "x"]])
    report = ScoreReport((result,))
    assert report.to_text() == (
        "ser: 0.500000 (1 edits / 2 tokens; sub 1, del 0, ins 0)\n"
    )
    assert report.to_tsv() == "ser\t0.500000\n"


def test_corpus_round_trip():
    pairs = [("u1", ("a", "b")), ("u2", ("c",))]
    text = write_corpus(pairs)
    assert text == "u1\ta b\nu2\tc\n"
    assert read_corpus(text) == pairs


def test_read_corpus_errors():
    with pytest.raises(FormatError, match="line 1.*TAB"):
        read_corpus("u1 a b\n")
    with pytest.raises(FormatError, match="line 2.*duplicate"):
        read_corpus("u1\ta\nu1\tb\n")
    # A trailing TAB with no tokens is stripped away with the id left alone.
    with pytest.raises(FormatError, match="line 3"):
        read_corpus("u1\ta\n\nu2\t  \n")
    with pytest.raises(FormatError, match="bad utterance id"):
        read_corpus("u 1\ta b\n")
    assert read_corpus("\n  \nu1\ta\n") == [("u1", ("a",))]


def test_pair_by_id():
    refs = [("u1", ("a",)), ("u2", ("b",))]
    hyps = [("u2", ("y",)), ("u1", ("x",))]
    ids, r, h = pair_by_id(refs, hyps)
    assert ids == ["u1", "u2"]
    assert r == [("a",), ("b",)] and h == [("x",), ("y",)]
    with pytest.raises(FormatError, match="missing for: u2"):
        pair_by_id(refs, hyps[1:])
    with pytest.raises(FormatError, match="unknown ids: u3"):
        pair_by_id(refs, hyps + [("u3", ("z",))])
