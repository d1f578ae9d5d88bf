"""Japanese mora inventory: size, mora table, nasal merging, separability."""

from importlib import resources

import pytest

from attrasr.errors import LexiconError
from attrasr.inventory import ALL_CATEGORIES, Category, parse_knowledge_source
from attrasr.japanese import (
    MORAE,
    build_seed_entries,
    merge_moraic_nasal,
    mora_entry,
)
from attrasr.lexicon import Lexicon, build_homonym_index, dump_lexicon, load_seed_lexicon


@pytest.fixture(scope="module")
def japanese():
    return load_seed_lexicon("japanese")


def test_inventory_size(japanese):
    assert len(MORAE) == 100
    assert len(japanese) == 200
    assert list(japanese.labels) == sorted(japanese.labels)
    # Every entry is a base mora or its nasal-extended form.
    base = set(MORAE)
    for label in japanese.labels:
        assert label in base or (label.endswith("n") and label[:-1] in base)


def test_packaged_tsv_matches_builder(japanese):
    built = Lexicon(build_seed_entries(), language="japanese")
    packaged = resources.files("attrasr").joinpath("data", "japanese_syllables.tsv")
    assert packaged.read_text(encoding="utf-8") == dump_lexicon(built)
    assert built.labels == japanese.labels


def test_nasal_extended_forms(japanese):
    for label in ("kan", "shin", "kyan", "wan", "pin"):
        assert label in japanese
        bare = japanese[label[:-1]].segments
        extended = japanese[label].segments
        assert extended[:-1] == bare
        tail = extended[-1]
        assert (tail.manner, tail.place) == ("nasal", "alveolar")
    # The moraic nasal is not a standalone entry.
    assert "n" not in japanese


def test_segment_spot_checks(japanese):
    ka = japanese["ka"].segments
    assert len(ka) == 2
    assert (ka[0].manner, ka[0].place, ka[0].voicing) == ("stop", "velar", "voiceless")

    kya = japanese["kya"].segments
    assert len(kya) == 3
    assert (kya[1].height, kya[1].backness) == ("high", "front")
    assert (kya[2].height, kya[2].backness) == ("low", "central")

    # Digraph onsets are one consonant segment, not two.
    for label in ("sha", "ja", "cha", "tsu"):
        assert len(japanese[label].segments) == 2

    ra = japanese["ra"].segments
    assert ra[0].manner == "flap"

    a = japanese["a"].segments
    assert len(a) == 1 and a[0].is_vowel


def test_voicing_pairs_differ_only_in_voicing(japanese):
    for voiceless, voiced in (("ka", "ga"), ("sa", "za"), ("ta", "da"),
                              ("shi", "ji"), ("pa", "ba")):
        vl = japanese[voiceless].segments
        vd = japanese[voiced].segments
        assert len(vl) == len(vd)
        assert vl[0].voicing == "voiceless" and vd[0].voicing == "voiced"
        for cat in Category:
            if cat is Category.VOICING:
                continue
            assert [s.value(cat) for s in vl] == [s.value(cat) for s in vd]


def test_voicing_pairs_merge_without_v(japanese):
    no_v = build_homonym_index(japanese, parse_knowledge_source("M+P+A+H+B"))
    assert no_v.same_class("ka", "ga")
    assert no_v.same_class("kan", "gan")
    assert no_v.same_class("pa", "ba")
    with_v = build_homonym_index(japanese, ALL_CATEGORIES)
    assert not with_v.same_class("ka", "ga")


def test_full_source_separates_everything(japanese):
    index = build_homonym_index(japanese, parse_knowledge_source("M+P+V+H+B"))
    assert len(index.classes) == 200
    assert all(len(cls) == 1 for cls in index.classes)


def test_class_counts_grow_with_knowledge(japanese):
    counts = {
        ks: len(build_homonym_index(japanese, parse_knowledge_source(ks)).classes)
        for ks in ("M+P", "M+P+H", "M+P+V+H+B")
    }
    assert counts == {"M+P": 42, "M+P+H": 112, "M+P+V+H+B": 200}


def test_merge_moraic_nasal():
    entries = merge_moraic_nasal(["ka", "n", "sa"])
    assert [e.syllable for e in entries] == ["kan", "sa"]
    assert entries[0].segments[:-1] == mora_entry("ka").segments
    entries = merge_moraic_nasal(["shi", "n", "ka", "n", "se", "n"])
    assert [e.syllable for e in entries] == ["shin", "kan", "sen"]
    with pytest.raises(LexiconError, match="preceding"):
        merge_moraic_nasal(["n", "ka"])
    with pytest.raises(LexiconError, match="unknown mora"):
        merge_moraic_nasal(["qq"])
