"""Mandarin toneless syllable inventory built from initial/final tables.

Finals are named in their underlying form ("ian", "uan", "v" for the front
rounded vowel, IME style: nv, lve).  Surface pinyin spellings (yan, wan, ju,
you, wei, ...) are produced by the composition rules.  Glides are encoded as
vowel segments, so e.g. xian and xuan differ only in medial /i/ vs /y/,
which carry identical attribute tuples (the inventory has no rounding
category).
"""

from __future__ import annotations

from .errors import LexiconError
from .inventory import AttributeTuple
from .lexicon import LexiconEntry

# initial -> (manner, place, voicing, aspiration)
INITIALS: dict[str, tuple[str, str, str, str]] = {
    "b": ("stop", "bilabial", "voiceless", "unaspirated"),
    "p": ("stop", "bilabial", "voiceless", "aspirated"),
    "m": ("nasal", "bilabial", "voiced", "unaspirated"),
    "f": ("fricative", "labiodental", "voiceless", "unaspirated"),
    "d": ("stop", "alveolar", "voiceless", "unaspirated"),
    "t": ("stop", "alveolar", "voiceless", "aspirated"),
    "n": ("nasal", "alveolar", "voiced", "unaspirated"),
    "l": ("approximant", "alveolar", "voiced", "unaspirated"),
    "g": ("stop", "velar", "voiceless", "unaspirated"),
    "k": ("stop", "velar", "voiceless", "aspirated"),
    "h": ("fricative", "velar", "voiceless", "unaspirated"),
    "j": ("affricate", "alveolo-palatal", "voiceless", "unaspirated"),
    "q": ("affricate", "alveolo-palatal", "voiceless", "aspirated"),
    "x": ("fricative", "alveolo-palatal", "voiceless", "unaspirated"),
    "zh": ("affricate", "retroflex", "voiceless", "unaspirated"),
    "ch": ("affricate", "retroflex", "voiceless", "aspirated"),
    "sh": ("fricative", "retroflex", "voiceless", "unaspirated"),
    "r": ("approximant", "retroflex", "voiced", "unaspirated"),
    "z": ("affricate", "alveolar", "voiceless", "unaspirated"),
    "c": ("affricate", "alveolar", "voiceless", "aspirated"),
    "s": ("fricative", "alveolar", "voiceless", "unaspirated"),
}

# vowel quality symbol -> (height, backness)
VOWEL_QUALITIES: dict[str, tuple[str, str]] = {
    "a": ("low", "central"),
    "o": ("upper-mid", "back"),
    "e": ("mid", "back"),         # [ɤ] of ge/le
    "@": ("mid", "central"),      # schwa of en/eng, nucleus of er
    "E": ("lower-mid", "front"),  # [ɛ] of ie/ve/ian/van
    "F": ("upper-mid", "front"),  # [e] of ei/ui
    "i": ("high", "front"),
    "u": ("high", "back"),
    "v": ("high", "front"),       # [y]; no rounding category, so same tuple as i
    "!": ("high", "central"),     # apical vowel of zhi/zi rows
}

_CODAS: dict[str, tuple[str, str, str, str]] = {
    "n": ("nasal", "alveolar", "voiced", "unaspirated"),
    "ng": ("nasal", "velar", "voiced", "unaspirated"),
}

# final name -> segment symbols (vowel qualities, optionally a nasal coda)
FINALS: dict[str, tuple[str, ...]] = {
    "a": ("a",),
    "o": ("o",),
    "e": ("e",),
    "er": ("@",),
    "ai": ("a", "i"),
    "ei": ("F", "i"),
    "ao": ("a", "u"),
    "ou": ("o", "u"),
    "an": ("a", "n"),
    "en": ("@", "n"),
    "ang": ("a", "ng"),
    "eng": ("@", "ng"),
    "ong": ("u", "ng"),
    "i": ("i",),
    "ia": ("i", "a"),
    "ie": ("i", "E"),
    "iao": ("i", "a", "u"),
    "iu": ("i", "o", "u"),
    "ian": ("i", "E", "n"),
    "in": ("i", "n"),
    "iang": ("i", "a", "ng"),
    "ing": ("i", "ng"),
    "iong": ("i", "u", "ng"),
    "u": ("u",),
    "ua": ("u", "a"),
    "uo": ("u", "o"),
    "uai": ("u", "a", "i"),
    "ui": ("u", "F", "i"),
    "uan": ("u", "a", "n"),
    "un": ("u", "@", "n"),
    "uang": ("u", "a", "ng"),
    "ueng": ("u", "@", "ng"),
    "v": ("v",),
    "ve": ("v", "E"),
    "van": ("v", "E", "n"),
    "vn": ("v", "n"),
}

# Initials whose bare "i" final is the apical vowel, not [i].
SIBILANT_INITIALS = frozenset(["zh", "ch", "sh", "r", "z", "c", "s"])

# Which finals combine with which initials ("" = zero initial).
FINALS_BY_INITIAL: dict[str, tuple[str, ...]] = {
    "b": ("a", "o", "ai", "ei", "ao", "an", "en", "ang", "eng",
          "i", "ie", "iao", "ian", "in", "ing", "u"),
    "p": ("a", "o", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng",
          "i", "ie", "iao", "ian", "in", "ing", "u"),
    "m": ("a", "o", "e", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng",
          "i", "ie", "iao", "iu", "ian", "in", "ing", "u"),
    "f": ("a", "o", "ei", "ou", "an", "en", "ang", "eng", "u"),
    "d": ("a", "e", "ai", "ei", "ao", "ou", "an", "ang", "eng", "ong",
          "i", "ie", "iao", "iu", "ian", "ing", "u", "uo", "ui", "uan", "un"),
    "t": ("a", "e", "ai", "ao", "ou", "an", "ang", "eng", "ong",
          "i", "ie", "iao", "ian", "ing", "u", "uo", "ui", "uan", "un"),
    "n": ("a", "e", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng", "ong",
          "i", "ie", "iao", "iu", "ian", "in", "iang", "ing",
          "u", "uo", "uan", "v", "ve"),
    "l": ("a", "e", "ai", "ei", "ao", "ou", "an", "ang", "eng", "ong",
          "i", "ia", "ie", "iao", "iu", "ian", "in", "iang", "ing",
          "u", "uo", "uan", "un", "v", "ve"),
    "g": ("a", "e", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng", "ong",
          "u", "ua", "uo", "uai", "ui", "uan", "un", "uang"),
    "k": ("a", "e", "ai", "ao", "ou", "an", "en", "ang", "eng", "ong",
          "u", "ua", "uo", "uai", "ui", "uan", "un", "uang"),
    "h": ("a", "e", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng", "ong",
          "u", "ua", "uo", "uai", "ui", "uan", "un", "uang"),
    "j": ("i", "ia", "ie", "iao", "iu", "ian", "in", "iang", "ing", "iong",
          "v", "ve", "van", "vn"),
    "q": ("i", "ia", "ie", "iao", "iu", "ian", "in", "iang", "ing", "iong",
          "v", "ve", "van", "vn"),
    "x": ("i", "ia", "ie", "iao", "iu", "ian", "in", "iang", "ing", "iong",
          "v", "ve", "van", "vn"),
    "zh": ("a", "e", "ai", "ao", "ou", "an", "en", "ang", "eng", "ong", "i",
           "u", "ua", "uo", "uai", "ui", "uan", "un", "uang"),
    "ch": ("a", "e", "ai", "ao", "ou", "an", "en", "ang", "eng", "ong", "i",
           "u", "uo", "uai", "ui", "uan", "un", "uang"),
    "sh": ("a", "e", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng", "i",
           "u", "ua", "uo", "uai", "ui", "uan", "un", "uang"),
    "r": ("e", "ao", "ou", "an", "en", "ang", "eng", "ong", "i",
          "u", "uo", "ui", "uan", "un"),
    "z": ("a", "e", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng", "ong",
          "i", "u", "uo", "ui", "uan", "un"),
    "c": ("a", "e", "ai", "ao", "ou", "an", "en", "ang", "eng", "ong",
          "i", "u", "uo", "ui", "uan", "un"),
    "s": ("a", "e", "ai", "ao", "ou", "an", "en", "ang", "eng", "ong",
          "i", "u", "uo", "ui", "uan", "un"),
    "": ("a", "o", "e", "er", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng",
         "i", "ia", "ie", "iao", "iu", "ian", "in", "iang", "ing", "iong",
         "u", "ua", "uo", "uai", "ui", "uan", "un", "uang", "ueng",
         "v", "ve", "van", "vn"),
}

# Attested but rare combinations kept out of the per-initial core lists.
RARE_PAIRS: tuple[tuple[str, str], ...] = (
    ("d", "ia"),    # dia
    ("d", "en"),    # den
    ("k", "ei"),    # kei
    ("zh", "ei"),   # zhei
    ("ch", "ua"),   # chua
    ("r", "ua"),    # rua
)

# Zero-initial spellings (underlying final -> written syllable).
_ZERO_INITIAL_SPELLING = {
    "i": "yi", "ia": "ya", "ie": "ye", "iao": "yao", "iu": "you",
    "ian": "yan", "in": "yin", "iang": "yang", "ing": "ying", "iong": "yong",
    "u": "wu", "ua": "wa", "uo": "wo", "uai": "wai", "ui": "wei",
    "uan": "wan", "un": "wen", "uang": "wang", "ueng": "weng",
    "v": "yu", "ve": "yue", "van": "yuan", "vn": "yun",
}

# j/q/x drop the umlaut: ju, que, xuan, jun.
_STRIP_V = {"v": "u", "ve": "ue", "van": "uan", "vn": "un"}


def _vowel(symbol: str) -> AttributeTuple:
    h, b = VOWEL_QUALITIES[symbol]
    return AttributeTuple("vowel", "vowel", "voiced", "unaspirated", h, b)


def surface_label(initial: str, final: str) -> str:
    """Written pinyin form of an (initial, final) pair."""
    if initial == "":
        return _ZERO_INITIAL_SPELLING.get(final, final)
    if final in _STRIP_V and initial in ("j", "q", "x"):
        return initial + _STRIP_V[final]
    return initial + final


def compose_mandarin(initial: str | None, final: str) -> LexiconEntry:
    """Build the lexicon entry for an initial+final pair.

    initial may be None or "" for zero-initial syllables.  The bare final
    "i" after the sibilant initials (zhi/chi/shi/ri/zi/ci/si) resolves to
    the apical vowel quality.
    """
    initial = initial or ""
    if initial and initial not in INITIALS:
        raise LexiconError(f"unknown Mandarin initial {initial!r}")
    if final not in FINALS:
        raise LexiconError(f"unknown Mandarin final {final!r}")
    segments: list[AttributeTuple] = []
    if initial:
        segments.append(AttributeTuple(*INITIALS[initial]))
    symbols = FINALS[final]
    if final == "i" and initial in SIBILANT_INITIALS:
        symbols = ("!",)
    for sym in symbols:
        if sym in _CODAS:
            segments.append(AttributeTuple(*_CODAS[sym]))
        else:
            segments.append(_vowel(sym))
    return LexiconEntry(surface_label(initial, final), tuple(segments))


def iter_syllable_pairs():
    """All (initial, final) pairs in the inventory, core table plus rare."""
    for initial, finals in FINALS_BY_INITIAL.items():
        for final in finals:
            yield initial, final
    yield from RARE_PAIRS


def build_seed_entries() -> list[LexiconEntry]:
    """The full toneless syllable inventory, sorted by written label."""
    entries = [compose_mandarin(ini, fin) for ini, fin in iter_syllable_pairs()]
    entries.sort(key=lambda e: e.syllable)
    return entries
