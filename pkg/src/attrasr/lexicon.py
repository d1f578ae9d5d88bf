"""Pronunciation lexicons mapping syllables to attribute-tuple sequences.

File format: one entry per line, ``syllable<TAB>seg;seg;...`` where each
segment is ``manner,place,voicing,aspiration,height,backness`` and ``-``
marks the absent height/backness of consonants.  ``#`` starts a comment,
blank lines are ignored, encoding is UTF-8.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .errors import LexiconError
from .inventory import AttributeTuple, KnowledgeSource, parse_knowledge_source

ProjectedTuple = tuple[Optional[str], ...]
ProjectedSeq = tuple[ProjectedTuple, ...]


@dataclass(frozen=True)
class LexiconEntry:
    syllable: str
    segments: tuple[AttributeTuple, ...]

    def __post_init__(self):
        if not self.syllable or any(ch.isspace() for ch in self.syllable):
            raise LexiconError(f"bad syllable label {self.syllable!r}")
        if not self.segments:
            raise LexiconError(f"{self.syllable!r} has no segments")
        if not any(seg.is_vowel for seg in self.segments):
            raise LexiconError(f"{self.syllable!r} has no vowel segment")


class Lexicon:
    """An immutable collection of entries with unique syllable labels."""

    def __init__(self, entries: Iterable[LexiconEntry], language: str = ""):
        self.entries: tuple[LexiconEntry, ...] = tuple(entries)
        self.language = language
        if not self.entries:
            raise LexiconError("lexicon is empty")
        self._by_label: dict[str, LexiconEntry] = {}
        for entry in self.entries:
            if entry.syllable in self._by_label:
                raise LexiconError(f"duplicate syllable {entry.syllable!r}")
            self._by_label[entry.syllable] = entry

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, label: str) -> bool:
        return label in self._by_label

    def __getitem__(self, label: str) -> LexiconEntry:
        try:
            return self._by_label[label]
        except KeyError:
            raise LexiconError(f"unknown syllable {label!r}") from None

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(e.syllable for e in self.entries)


_ABSENT = "-"


def _format_segment(seg: AttributeTuple) -> str:
    return ",".join(
        [
            seg.manner,
            seg.place,
            seg.voicing,
            seg.aspiration,
            seg.height if seg.height is not None else _ABSENT,
            seg.backness if seg.backness is not None else _ABSENT,
        ]
    )


def _parse_segment(text: str, where: str) -> AttributeTuple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 6:
        raise LexiconError(f"{where}: segment {text!r} needs 6 fields")
    m, p, v, a, h, b = parts
    try:
        return AttributeTuple(
            manner=m,
            place=p,
            voicing=v,
            aspiration=a,
            height=None if h == _ABSENT else h,
            backness=None if b == _ABSENT else b,
        )
    except Exception as exc:
        raise LexiconError(f"{where}: {exc}") from None


def load_lexicon(text: str, language: str = "") -> Lexicon:
    """Parse lexicon TSV text; errors carry 1-based line numbers."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise LexiconError(f"line {lineno}: expected 'syllable<TAB>segments'")
        label, seg_text = fields[0].strip(), fields[1].strip()
        segs = tuple(
            _parse_segment(part, f"line {lineno}")
            for part in seg_text.split(";")
            if part.strip()
        )
        try:
            entries.append(LexiconEntry(label, segs))
        except LexiconError as exc:
            raise LexiconError(f"line {lineno}: {exc}") from None
    return Lexicon(entries, language=language)


def dump_lexicon(lex: Lexicon) -> str:
    lines = [
        f"{entry.syllable}\t" + ";".join(_format_segment(s) for s in entry.segments)
        for entry in lex.entries
    ]
    return "\n".join(lines) + "\n"


def load_seed_lexicon(name: str) -> Lexicon:
    """Load a lexicon shipped with the package ("mandarin" or "japanese")."""
    from importlib import resources

    path = resources.files("attrasr").joinpath("data", f"{name}_syllables.tsv")
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise LexiconError(f"no seed lexicon named {name!r}") from None
    return load_lexicon(text, language=name)


def project_syllable(lex: Lexicon, syllable: str, ks: KnowledgeSource) -> ProjectedSeq:
    """Segment-wise projection of a syllable's entry under ks."""
    entry = lex[syllable]
    return tuple(seg.project(ks) for seg in entry.segments)


def syllable_to_attributes(lex: Lexicon, syllable: str, ks: KnowledgeSource):
    """Attribute view of a syllable under ks.

    Single-category ks: the flattened value sequence, with segments that do
    not carry the category (consonants under H or B) dropped.  Multi-category
    ks: one projected tuple per segment, absent values kept as None.
    """
    segs = project_syllable(lex, syllable, ks)
    if len(ks) == 1:
        return tuple(vals[0] for vals in segs if vals[0] is not None)
    return segs


class HomonymClassIndex:
    """Partition of a lexicon's syllables by projected segment sequence.

    Two syllables share a class iff their entries project to identical
    segment sequences under the index's knowledge source.  The class
    representative is the lexicographically smallest member.
    """

    def __init__(self, ks: KnowledgeSource, groups: Mapping[ProjectedSeq, Iterable[str]]):
        self.ks = ks
        self._by_projection: dict[ProjectedSeq, tuple[str, ...]] = {
            key: tuple(sorted(members)) for key, members in groups.items()
        }
        self.classes: tuple[tuple[str, ...], ...] = tuple(
            sorted(self._by_projection.values())
        )
        self._class_by_label: dict[str, tuple[str, ...]] = {}
        for cls in self.classes:
            for label in cls:
                self._class_by_label[label] = cls

    def representative(self, syllable: str) -> str:
        return self.class_of(syllable)[0]

    def class_of(self, syllable: str) -> tuple[str, ...]:
        try:
            return self._class_by_label[syllable]
        except KeyError:
            raise LexiconError(f"unknown syllable {syllable!r}") from None

    def same_class(self, a: str, b: str) -> bool:
        return self.representative(a) == self.representative(b)

    def canonicalize(self, tokens: Iterable[str]) -> tuple[str, ...]:
        return tuple(self.representative(t) for t in tokens)


def build_homonym_index(
    lex: Lexicon, ks: Union[KnowledgeSource, str]
) -> HomonymClassIndex:
    if isinstance(ks, str):
        ks = parse_knowledge_source(ks)
    groups: dict[ProjectedSeq, list[str]] = {}
    for entry in lex.entries:
        key = tuple(seg.project(ks) for seg in entry.segments)
        groups.setdefault(key, []).append(entry.syllable)
    return HomonymClassIndex(ks, groups)


def attributes_to_syllables(index: HomonymClassIndex, seq: ProjectedSeq) -> frozenset:
    """All syllables whose projection equals seq; empty set if none."""
    return frozenset(index._by_projection.get(tuple(seq), ()))
