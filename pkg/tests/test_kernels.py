"""Compiled and pure-Python kernels must be interchangeable, bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from attrasr import kernels
from attrasr.decoder import beam_decode, build_decode_context
from attrasr.errors import DecodeFailure
from attrasr.lexicon import load_seed_lexicon
from attrasr.lm import build_automaton, train_ngram
from attrasr.inventory import parse_knowledge_source

from .toys import basic_lexicon, random_ks, random_lexicon, random_posteriors

compiled = kernels.get_backend("compiled")
python = kernels.get_backend("python")


def test_compiled_backend_is_the_default():
    assert compiled.BACKEND == "compiled"
    assert python.BACKEND == "python"
    assert kernels.BACKEND == "compiled"
    assert kernels.get_backend() is compiled


def test_get_backend_rejects_unknown_names():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_op_codes_agree():
    for name in ("MATCH", "SUB", "DEL", "INS"):
        assert getattr(compiled, name) == getattr(python, name)


def test_env_var_forces_python_backend():
    env = dict(os.environ, ATTRASR_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import attrasr.kernels as k; print(k.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"
    env["ATTRASR_PURE_PYTHON"] = "0"
    out = subprocess.run(
        [sys.executable, "-c", "import attrasr.kernels as k; print(k.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "compiled"


id_seq = st.lists(st.integers(min_value=0, max_value=6), min_size=0, max_size=15)


@settings(max_examples=100, deadline=None)
@given(id_seq, id_seq)
def test_levenshtein_identical_across_backends(ref, hyp):
    ops_c, *counts_c = compiled.levenshtein(ref, hyp)
    ops_p, *counts_p = python.levenshtein(ref, hyp)
    assert counts_c == counts_p
    assert np.array_equal(np.asarray(ops_c), np.asarray(ops_p))


def test_lm_query_identical_across_backends():
    model = train_ngram([["a", "b", "c"], ["a", "b"], ["c", "d"]], order=2)
    auto = build_automaton(model)
    for state in range(len(auto.bow)):
        for word in range(auto.n_words):
            if word == auto.word_index["<s>"]:
                continue
            got_c = compiled.lm_query(
                auto.keys, auto.logp, auto.next_state, auto.bow, auto.parent,
                auto.n_words, state, word,
            )
            got_p = python.lm_query(
                auto.keys, auto.logp, auto.next_state, auto.bow, auto.parent,
                auto.n_words, state, word,
            )
            assert got_c == got_p
            assert got_c[0] == auto.query(state, word)[0]
            assert got_c[1] == auto.query(state, word)[1]


def _decode_both(ps, ks, ctx, **kwargs):
    a = beam_decode(ps, ks, ctx, kernel="compiled", **kwargs)
    b = beam_decode(ps, ks, ctx, kernel="python", **kwargs)
    return a, b


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_beam_search_bitwise_identical_across_backends(seed):
    rng = np.random.default_rng(seed)
    lex = random_lexicon(rng, int(rng.integers(3, 10)))
    ks = random_ks(rng)
    ctx = build_decode_context(lex, ks)
    ps = random_posteriors(rng, ks, frames=int(rng.integers(2, 9)))
    try:
        a, b = _decode_both(ps, ks, ctx, beam_width=8, nbest=5)
    except DecodeFailure:
        with pytest.raises(DecodeFailure):
            beam_decode(ps, ks, ctx, kernel="python", beam_width=8, nbest=5)
        return
    assert [h.syllables for h in a.hypotheses] == [h.syllables for h in b.hypotheses]
    assert [h.score for h in a.hypotheses] == [h.score for h in b.hypotheses]
    assert [h.acoustic for h in a.hypotheses] == [h.acoustic for h in b.hypotheses]


def test_beam_search_with_lm_bitwise_identical():
    rng = np.random.default_rng(42)
    lex = basic_lexicon()
    ks = parse_knowledge_source("M+P+V")
    lm = train_ngram([["da", "an"], ["dan", "i"], ["ta", "i"]], order=2)
    ctx = build_decode_context(lex, ks, lm=lm)
    for _ in range(5):
        ps = random_posteriors(rng, ks, frames=7)
        a = beam_decode(ps, ks, ctx, kernel="compiled", beam_width=6,
                        lm_weight=0.7, insertion_bonus=0.3, nbest=8)
        b = beam_decode(ps, ks, ctx, kernel="python", beam_width=6,
                        lm_weight=0.7, insertion_bonus=0.3, nbest=8)
        assert [h.syllables for h in a.hypotheses] == [h.syllables for h in b.hypotheses]
        assert [h.score for h in a.hypotheses] == [h.score for h in b.hypotheses]
        assert [h.lm_log10 for h in a.hypotheses] == [h.lm_log10 for h in b.hypotheses]


def test_seed_lexicon_decode_identical_across_backends():
    rng = np.random.default_rng(5)
    ks = parse_knowledge_source("M+P+H")
    lex = load_seed_lexicon("mandarin")
    ctx = build_decode_context(lex, ks)
    ps = random_posteriors(rng, ks, frames=10, concentration=1.0)
    a = beam_decode(ps, ks, ctx, kernel="compiled", beam_width=12, nbest=4)
    b = beam_decode(ps, ks, ctx, kernel="python", beam_width=12, nbest=4)
    assert [(h.syllables, h.score) for h in a.hypotheses] == [
        (h.syllables, h.score) for h in b.hypotheses
    ]
