"""N-gram training, ARPA serialization, and the decoding automaton.

The smoothing oracles below were worked out by hand from the counting
definitions (interpolated Kneser-Ney, discount 0.75, lower orders from
left-continuation type counts except for sentence-initial grams; add-k
with k=0.01 spreading mass proportional to the lower-order distribution).
"""

import math

import pytest
from hypothesis import given, settings, strategies as st

from attrasr.errors import FormatError
from attrasr.lm import (
    BOS,
    BOS_LOG10,
    EOS,
    UNK,
    build_automaton,
    parse_arpa,
    perplexity,
    serialize_arpa,
    train_ngram,
)

KN_CORPUS = [["a", "b", "c"], ["a", "b"], ["c", "d"]]

# Hand-computed probabilities for KN_CORPUS at order 2, D=0.75, V=6.
KN_UNIGRAMS = {
    "a": 0.109375,       # 0.25/8 + (0.75*5/8)/6
    "b": 0.109375,
    "c": 0.234375,       # 1.25/8 + ...
    "d": 0.109375,
    EOS: 0.359375,       # 2.25/8 + ...
    UNK: 0.078125,       # continuation count 0
}
KN_BIGRAMS = {
    (BOS, "a"): 1.25 / 3 + 0.5 * KN_UNIGRAMS["a"],
    (BOS, "c"): 0.25 / 3 + 0.5 * KN_UNIGRAMS["c"],
    ("a", "b"): 0.666015625,    # 1.25/2 + 0.375 * P1(b)
    ("b", "c"): 0.30078125,
    ("b", EOS): 0.39453125,
    ("c", "d"): 0.20703125,
    ("c", EOS): 0.39453125,
    ("d", EOS): 0.51953125,
}
KN_BOWS = {(BOS,): 0.5, ("a",): 0.375, ("b",): 0.75, ("c",): 0.75, ("d",): 0.75}


@pytest.fixture(scope="module")
def kn_model():
    return train_ngram(KN_CORPUS, order=2)


def test_kn_smoothing_selected(kn_model):
    assert kn_model.smoothing == "kneser-ney"
    assert kn_model.order == 2
    assert kn_model.vocab == ("</s>", "<s>", "<unk>", "a", "b", "c", "d")


def test_kn_unigrams_match_hand_oracle(kn_model):
    for word, p in KN_UNIGRAMS.items():
        assert kn_model.cond_log10((), word) == pytest.approx(math.log10(p), abs=1e-12)
    assert kn_model.cond_log10((), BOS) == BOS_LOG10


def test_kn_bigrams_match_hand_oracle(kn_model):
    for (ctx, word), p in KN_BIGRAMS.items():
        got = kn_model.cond_log10((ctx,), word)
        assert got == pytest.approx(math.log10(p), abs=1e-12), (ctx, word)


def test_kn_backoff_weights_match_hand_oracle(kn_model):
    for ctx, w in KN_BOWS.items():
        assert kn_model.bow_log10(ctx) == pytest.approx(math.log10(w), abs=1e-12)


def test_kn_backed_off_probability(kn_model):
    # (a, d) is unseen: P(d|a) = bow(a) * P1(d).
    want = math.log10(0.375 * KN_UNIGRAMS["d"])
    assert kn_model.cond_log10(("a",), "d") == pytest.approx(want, abs=1e-12)
    # Unseen context backs off to the unigram.
    assert kn_model.cond_log10(("zzz",), "a") == pytest.approx(
        kn_model.cond_log10((UNK,), "a"), abs=1e-15)


def test_kn_distributions_normalize(kn_model):
    predicted = [w for w in kn_model.vocab if w != BOS]
    for ctx in ((), ("a",), (BOS,), ("qqq",), ("b",), ("c", "d")):
        total = sum(10.0 ** kn_model.cond_log10(ctx, w) for w in predicted)
        assert total == pytest.approx(1.0, abs=1e-6), ctx


def test_sentence_scores_compose_from_conditionals(kn_model):
    p = KN_BIGRAMS[(BOS, "a")] * KN_BIGRAMS[("a", "b")] * KN_BIGRAMS[("b", EOS)]
    assert kn_model.score(["a", "b"]) == pytest.approx(math.log(p), abs=1e-12)
    # Empty sentence: P(</s> | <s>) comes from back-off.
    empty = kn_model.score([])
    want = math.log(0.5 * KN_UNIGRAMS[EOS])
    assert empty == pytest.approx(want, abs=1e-12)
    # score_tokens has no boundary terms.
    want_tokens = math.log(KN_UNIGRAMS["a"] * KN_BIGRAMS[("a", "b")])
    assert kn_model.score_tokens(["a", "b"]) == pytest.approx(want_tokens, abs=1e-12)


def test_perplexity_matches_hand_value(kn_model):
    p = KN_BIGRAMS[(BOS, "a")] * KN_BIGRAMS[("a", "b")] * KN_BIGRAMS[("b", EOS)]
    assert perplexity(kn_model, [["a", "b"]]) == pytest.approx(
        p ** (-1.0 / 3.0), rel=1e-12)
    with pytest.raises(ValueError):
        perplexity(kn_model, [])


def test_add_k_hand_oracle():
    model = train_ngram([["a", "b"]], order=1, smoothing="add-k")
    assert model.smoothing == "add-k"
    # V=4 predicted (a, b, </s>, <unk>), k=0.01: kv=0.04, den=3.
    assert model.cond_log10((), "a") == pytest.approx(math.log10(1.01 / 3.04), abs=1e-12)
    assert model.cond_log10((), "b") == pytest.approx(math.log10(1.01 / 3.04), abs=1e-12)
    assert model.cond_log10((), EOS) == pytest.approx(math.log10(1.01 / 3.04), abs=1e-12)
    assert model.cond_log10((), UNK) == pytest.approx(math.log10(0.01 / 3.04), abs=1e-12)


def test_auto_smoothing_falls_back_on_degenerate_counts():
    # No doubleton anywhere: KN discounting is undefined, add-k takes over.
    assert train_ngram([["a", "b"]], order=2).smoothing == "add-k"
    assert train_ngram([["a", "a", "a"]], order=1).smoothing == "add-k"
    assert train_ngram(KN_CORPUS, order=2).smoothing == "kneser-ney"


def test_train_input_validation():
    with pytest.raises(ValueError, match="order"):
        train_ngram(KN_CORPUS, order=0)
    with pytest.raises(ValueError, match="order"):
        train_ngram(KN_CORPUS, order=6)
    with pytest.raises(ValueError, match="no tokens"):
        train_ngram([[], []], order=2)
    with pytest.raises(ValueError, match="smoothing"):
        train_ngram(KN_CORPUS, order=2, smoothing="laplace")


def test_arpa_round_trip(kn_model):
    text = serialize_arpa(kn_model)
    back = parse_arpa(text)
    assert back.order == kn_model.order
    assert back.vocab == kn_model.vocab
    assert back.logp == kn_model.logp
    assert back.bow[0] == kn_model.bow[0]
    # repr floats parse back exactly, so re-serialization is the identity.
    assert serialize_arpa(back) == text


def test_arpa_section_counts_match_header(kn_model):
    text = serialize_arpa(kn_model)
    head, body = text.split("\\1-grams:", 1)
    assert f"ngram 1={len(kn_model.logp[0])}" in head
    assert f"ngram 2={len(kn_model.logp[1])}" in head


@pytest.mark.parametrize(
    "mangle, message",
    [
        (lambda t: t.replace("\\data\\", "\\data", 1), "data"),
        (lambda t: t.replace("ngram 1=", "ngram one=", 1), "bad ngram count"),
        (lambda t: t.replace("ngram 2=", "ngram 3=", 1), "in sequence"),
        (lambda t: t.replace("\\2-grams:", "\\3-grams:", 1), "2-grams"),
        (lambda t: t.replace("\\end\\", "", 1), "end"),
    ],
)
def test_arpa_parse_rejects_malformed(kn_model, mangle, message):
    with pytest.raises(FormatError, match=message):
        parse_arpa(mangle(serialize_arpa(kn_model)))


def test_arpa_parse_rejects_bad_rows(kn_model):
    text = serialize_arpa(kn_model)
    lines = text.splitlines()
    at = lines.index("\\1-grams:") + 1
    lines.insert(at, lines[at])
    with pytest.raises(FormatError, match="duplicate gram"):
        parse_arpa("\n".join(lines) + "\n")

    lines = text.splitlines()
    lines[at] = "notafloat\ta"
    with pytest.raises(FormatError, match="log-probability"):
        parse_arpa("\n".join(lines) + "\n")

    lines = text.splitlines()
    bigram_at = lines.index("\\2-grams:") + 1
    lines[bigram_at] = lines[bigram_at] + "\t-0.5"
    with pytest.raises(FormatError, match="cannot carry bow"):
        parse_arpa("\n".join(lines) + "\n")

    # Declared count no longer matches after dropping a unigram row.
    lines = text.splitlines()
    del lines[at]
    with pytest.raises(FormatError, match="header declared"):
        parse_arpa("\n".join(lines) + "\n")


def test_arpa_requires_special_unigrams(kn_model):
    text = serialize_arpa(kn_model)
    lines = [l for l in text.splitlines() if not l.endswith("\t" + UNK)]
    lines[1] = f"ngram 1={len(kn_model.logp[0]) - 1}"
    with pytest.raises(FormatError, match="<unk>"):
        parse_arpa("\n".join(lines) + "\n")


corpus_strategy = st.lists(
    st.lists(st.sampled_from(["a", "b", "c", "d", "e"]), min_size=0, max_size=8),
    min_size=1,
    max_size=12,
).filter(lambda sents: any(sents))


@settings(max_examples=60, deadline=None)
@given(corpus_strategy, st.integers(min_value=1, max_value=3))
def test_trained_models_normalize(corpus, order):
    model = train_ngram(corpus, order=order)
    predicted = [w for w in model.vocab if w != BOS]
    contexts = [(), (BOS,), ("a",), ("e", "a"), ("zzz",)]
    for ctx in contexts:
        total = sum(10.0 ** model.cond_log10(ctx, w) for w in predicted)
        assert total == pytest.approx(1.0, abs=1e-6), ctx


@settings(max_examples=40, deadline=None)
@given(corpus_strategy, st.integers(min_value=1, max_value=3))
def test_arpa_round_trip_random_models(corpus, order):
    model = train_ngram(corpus, order=order)
    text = serialize_arpa(model)
    back = parse_arpa(text)
    assert back.logp == model.logp
    assert all(back.bow[k] == model.bow[k] for k in range(order))
    assert serialize_arpa(back) == text


@settings(max_examples=40, deadline=None)
@given(
    corpus_strategy,
    st.integers(min_value=1, max_value=3),
    st.lists(st.sampled_from(["a", "b", "c", "x"]), min_size=0, max_size=6),
)
def test_automaton_agrees_with_conditionals(corpus, order, sentence):
    model = train_ngram(corpus, order=order)
    auto = build_automaton(model)
    assert auto.eos == auto.word_index[EOS]
    assert auto.unk == auto.word_index[UNK]

    state = auto.initial
    history = [BOS]
    for tok in sentence + [EOS]:
        want = model.cond_log10(tuple(history), tok)
        word = auto.word_index.get(model.fold(tok), auto.unk)
        got, state = auto.query(state, word)
        assert got == pytest.approx(want, abs=1e-12), (history, tok)
        history.append(model.fold(tok))
