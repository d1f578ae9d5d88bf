"""Japanese mora inventory and moraic-nasal merging.

Morae are named in romaji.  The moraic nasal ("n" as a standalone mora) is
not a syllable of its own: it merges into the preceding mora, so the seed
lexicon contains kan, shin, kyan, ... next to ka, shi, kya.  Palatalized
(yōon) onsets are encoded as consonant + /i/ glide-as-vowel + vowel.
Long vowels and geminates are written as repeated segments within one
entry; the seed lexicon does not include any, but the formats support them.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import LexiconError
from .inventory import AttributeTuple
from .lexicon import LexiconEntry

# consonant symbol -> (manner, place, voicing, aspiration)
CONSONANTS: dict[str, tuple[str, str, str, str]] = {
    "k": ("stop", "velar", "voiceless", "unaspirated"),
    "g": ("stop", "velar", "voiced", "unaspirated"),
    "s": ("fricative", "alveolar", "voiceless", "unaspirated"),
    "z": ("fricative", "alveolar", "voiced", "unaspirated"),
    "sh": ("fricative", "alveolo-palatal", "voiceless", "unaspirated"),
    "j": ("fricative", "alveolo-palatal", "voiced", "unaspirated"),
    "t": ("stop", "alveolar", "voiceless", "unaspirated"),
    "d": ("stop", "alveolar", "voiced", "unaspirated"),
    "ch": ("affricate", "alveolo-palatal", "voiceless", "unaspirated"),
    "ts": ("affricate", "alveolar", "voiceless", "unaspirated"),
    "n": ("nasal", "alveolar", "voiced", "unaspirated"),
    "m": ("nasal", "bilabial", "voiced", "unaspirated"),
    "h": ("fricative", "glottal", "voiceless", "unaspirated"),
    "f": ("fricative", "bilabial", "voiceless", "unaspirated"),
    "b": ("stop", "bilabial", "voiced", "unaspirated"),
    "p": ("stop", "bilabial", "voiceless", "unaspirated"),
    "r": ("flap", "alveolar", "voiced", "unaspirated"),
    "y": ("approximant", "palatal", "voiced", "unaspirated"),
    "w": ("approximant", "bilabial", "voiced", "unaspirated"),
}

# The moraic nasal surfaces with a default alveolar place.
MORAIC_NASAL: tuple[str, str, str, str] = ("nasal", "alveolar", "voiced", "unaspirated")

VOWELS: dict[str, tuple[str, str]] = {
    "a": ("low", "central"),
    "i": ("high", "front"),
    "u": ("high", "back"),
    "e": ("mid", "front"),
    "o": ("mid", "back"),
}

_PLAIN_ROWS = {
    "": ("a", "i", "u", "e", "o"),
    "k": ("a", "i", "u", "e", "o"),
    "g": ("a", "i", "u", "e", "o"),
    "n": ("a", "i", "u", "e", "o"),
    "b": ("a", "i", "u", "e", "o"),
    "p": ("a", "i", "u", "e", "o"),
    "m": ("a", "i", "u", "e", "o"),
    "r": ("a", "i", "u", "e", "o"),
    "s": ("a", "u", "e", "o"),
    "z": ("a", "u", "e", "o"),
    "t": ("a", "e", "o"),
    "d": ("a", "e", "o"),
    "h": ("a", "i", "e", "o"),
    "y": ("a", "u", "o"),
    "w": ("a",),
}

# Morae whose romaji is not onset+vowel concatenation of the rows above.
_EXTRA_MORAE = {
    "shi": ("sh", "i"),
    "ji": ("j", "i"),
    "chi": ("ch", "i"),
    "tsu": ("ts", "u"),
    "fu": ("f", "u"),
}

_PALATAL_ONSETS = ("k", "g", "n", "h", "b", "p", "m", "r")


def _build_mora_table() -> dict[str, tuple[str, ...]]:
    table: dict[str, tuple[str, ...]] = {}
    for onset, vowels in _PLAIN_ROWS.items():
        for v in vowels:
            label = onset + v
            table[label] = ((onset,) if onset else ()) + (v,)
    for label, (onset, v) in _EXTRA_MORAE.items():
        table[label] = (onset, v)
    # kya = k + glide i + a; sha/ja/cha already carry a palatal consonant.
    for onset in _PALATAL_ONSETS:
        for v in ("a", "u", "o"):
            table[onset + "y" + v] = (onset, "i", v)
    for onset in ("sh", "j", "ch"):
        for v in ("a", "u", "o"):
            table[onset + v] = (onset, v)
    return table


# mora label -> segment symbols (consonants and vowels)
MORAE: dict[str, tuple[str, ...]] = _build_mora_table()


def _segments_for(symbols: Iterable[str]) -> tuple[AttributeTuple, ...]:
    segs = []
    for sym in symbols:
        if sym in CONSONANTS:
            segs.append(AttributeTuple(*CONSONANTS[sym]))
        else:
            h, b = VOWELS[sym]
            segs.append(AttributeTuple("vowel", "vowel", "voiced", "unaspirated", h, b))
    return tuple(segs)


def mora_entry(label: str) -> LexiconEntry:
    try:
        symbols = MORAE[label]
    except KeyError:
        raise LexiconError(f"unknown mora {label!r}") from None
    return LexiconEntry(label, _segments_for(symbols))


def merge_moraic_nasal(morae: Sequence[str]) -> list[LexiconEntry]:
    """Turn a mora sequence into syllable entries, folding standalone "n".

    "ka n sa" -> entries kan, sa.  A leading moraic nasal has nothing to
    merge into and is an error.
    """
    entries: list[LexiconEntry] = []
    nasal = AttributeTuple(*MORAIC_NASAL)
    for token in morae:
        if token in ("n", "N"):
            if not entries:
                raise LexiconError("moraic nasal with no preceding mora")
            prev = entries.pop()
            entries.append(
                LexiconEntry(prev.syllable + "n", prev.segments + (nasal,))
            )
        else:
            entries.append(mora_entry(token))
    return entries


def build_seed_entries() -> list[LexiconEntry]:
    """All base morae plus their moraic-nasal-merged forms, label-sorted."""
    entries = []
    nasal = AttributeTuple(*MORAIC_NASAL)
    for label in MORAE:
        base = mora_entry(label)
        entries.append(base)
        entries.append(LexiconEntry(base.syllable + "n", base.segments + (nasal,)))
    entries.sort(key=lambda e: e.syllable)
    return entries
