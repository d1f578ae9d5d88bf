"""Small lexicon and posterior builders shared across test modules."""

from __future__ import annotations

import numpy as np

from attrasr.inventory import VALUES, AttributeTuple, Category, KnowledgeSource
from attrasr.lexicon import Lexicon, LexiconEntry
from attrasr.posteriors import CategoryStream, PosteriorSet, class_labels

CONSONANT_MANNERS = tuple(v for v in VALUES[Category.MANNER] if v != "vowel")
CONSONANT_PLACES = tuple(v for v in VALUES[Category.PLACE] if v != "vowel")


def cons(manner="stop", place="alveolar", voicing="voiced", aspiration="unaspirated"):
    return AttributeTuple(manner, place, voicing, aspiration)


def vow(height="low", backness="central", voicing="voiced", aspiration="unaspirated"):
    return AttributeTuple("vowel", "vowel", voicing, aspiration, height, backness)


def toy_lexicon(mapping: dict[str, list[AttributeTuple]], language="toy") -> Lexicon:
    return Lexicon(
        [LexiconEntry(label, tuple(segs)) for label, segs in mapping.items()],
        language=language,
    )


def basic_lexicon() -> Lexicon:
    """Five syllables with shared prefixes and one homonym pair.

    "da" and "ta" differ only in voicing, so they merge under any source
    without V.  "dan" extends "da" inside the trie, and "an" overlaps the
    tail of "dan", giving the segmentation ambiguity cases a home.
    """
    a = vow("low", "central")
    n = cons("nasal", "alveolar")
    return toy_lexicon({
        "da": [cons("stop", "alveolar", "voiced"), a],
        "ta": [cons("stop", "alveolar", "voiceless"), a],
        "dan": [cons("stop", "alveolar", "voiced"), a, n],
        "an": [a, n],
        "i": [vow("high", "front")],
    })


def random_lexicon(rng: np.random.Generator, n_entries: int = 12) -> Lexicon:
    """A random well-formed lexicon with distinct labels (duplicates in
    segment content are allowed and produce homonyms)."""
    entries = {}
    for i in range(n_entries):
        n_segs = int(rng.integers(1, 4))
        vowel_at = int(rng.integers(0, n_segs))
        segs = []
        for s in range(n_segs):
            voicing = VALUES[Category.VOICING][int(rng.integers(2))]
            aspiration = VALUES[Category.ASPIRATION][int(rng.integers(2))]
            if s == vowel_at or rng.random() < 0.4:
                segs.append(AttributeTuple(
                    "vowel", "vowel", voicing, aspiration,
                    VALUES[Category.HEIGHT][int(rng.integers(7))],
                    VALUES[Category.BACKNESS][int(rng.integers(3))],
                ))
            else:
                segs.append(AttributeTuple(
                    CONSONANT_MANNERS[int(rng.integers(len(CONSONANT_MANNERS)))],
                    CONSONANT_PLACES[int(rng.integers(len(CONSONANT_PLACES)))],
                    voicing, aspiration,
                ))
        entries[f"s{i:02d}"] = segs
    return toy_lexicon(entries, language="random")


def random_ks(rng: np.random.Generator) -> KnowledgeSource:
    cats = list(Category)
    picked = [c for c in cats if rng.random() < 0.5]
    if not picked:
        picked = [cats[int(rng.integers(len(cats)))]]
    return KnowledgeSource(tuple(picked))


def random_posteriors(
    rng: np.random.Generator,
    ks: KnowledgeSource,
    frames: int,
    utterance_id: str = "u0",
    concentration: float = 0.3,
) -> PosteriorSet:
    """Dense random rows (Dirichlet), valid for every category of ks."""
    streams = {}
    for cat in ks:
        n = len(class_labels(cat))
        rows = rng.dirichlet(np.full(n, concentration), size=frames)
        streams[cat] = CategoryStream(category=cat, probs=rows)
    return PosteriorSet(utterance_id=utterance_id, streams=streams)
