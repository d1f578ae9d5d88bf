"""Articulatory attribute categories, closed value sets, and knowledge sources.

Every speech segment is described by a tuple of attribute values drawn from
six closed categories: manner, place, voicing, aspiration, height, and
backness.  Height and backness exist only on vowel segments.  A "knowledge
source" is the subset of categories a model or decoding pass actually uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

from .errors import InventoryError


class Category(Enum):
    """The six attribute categories, declared in canonical display order."""

    MANNER = "M"
    PLACE = "P"
    VOICING = "V"
    ASPIRATION = "A"
    HEIGHT = "H"
    BACKNESS = "B"


CATEGORY_ORDER: tuple[Category, ...] = tuple(Category)
_CATEGORY_RANK = {cat: i for i, cat in enumerate(CATEGORY_ORDER)}

VALUES: dict[Category, tuple[str, ...]] = {
    Category.MANNER: (
        "nasal", "stop", "affricate", "fricative", "flap", "trill",
        "approximant", "click", "ejective", "implosive", "vowel",
    ),
    Category.PLACE: (
        "bilabial", "labiodental", "dental", "alveolar", "palato-alveolar",
        "retroflex", "alveolo-palatal", "palatal", "velar", "uvular",
        "glottal", "vowel",
    ),
    Category.VOICING: ("voiced", "voiceless"),
    Category.ASPIRATION: ("aspirated", "unaspirated"),
    Category.HEIGHT: (
        "high", "semi-high", "upper-mid", "mid", "lower-mid", "semi-low", "low",
    ),
    Category.BACKNESS: ("front", "central", "back"),
}

# Accepted spelling variants, normalized on input.
VALUE_ALIASES: dict[Category, dict[str, str]] = {
    Category.HEIGHT: {"semi-mid": "semi-low"},
}

_VALUE_SETS = {cat: frozenset(vals) for cat, vals in VALUES.items()}


def parse_category(text: str) -> Category:
    """Parse a one-letter category abbreviation (case-insensitive)."""
    try:
        return Category(text.strip().upper())
    except ValueError:
        raise InventoryError(f"unknown attribute category {text!r}") from None


def canonical_value(category: Category, label: str) -> str:
    """Normalize a value label within a category; raise if it is not valid."""
    low = label.strip().lower()
    low = VALUE_ALIASES.get(category, {}).get(low, low)
    if low not in _VALUE_SETS[category]:
        raise InventoryError(f"{low!r} is not a {category.name.lower()} value")
    return low


@dataclass(frozen=True)
class KnowledgeSource:
    """A non-empty subset of categories, held in canonical order."""

    categories: tuple[Category, ...]

    def __post_init__(self):
        if not self.categories:
            raise InventoryError("knowledge source must name at least one category")
        if len(set(self.categories)) != len(self.categories):
            raise InventoryError("duplicate category in knowledge source")
        ordered = tuple(sorted(self.categories, key=_CATEGORY_RANK.__getitem__))
        object.__setattr__(self, "categories", ordered)

    def __str__(self) -> str:
        return "+".join(cat.value for cat in self.categories)

    def __iter__(self) -> Iterator[Category]:
        return iter(self.categories)

    def __len__(self) -> int:
        return len(self.categories)

    def __contains__(self, category: Category) -> bool:
        return category in self.categories

    def is_subset(self, other: "KnowledgeSource") -> bool:
        return set(self.categories) <= set(other.categories)


def parse_knowledge_source(text: str) -> KnowledgeSource:
    """Parse e.g. "M+P+H" (order- and case-insensitive) into a KnowledgeSource."""
    parts = [p for p in (piece.strip() for piece in text.split("+")) if p]
    if not parts:
        raise InventoryError(f"empty knowledge source {text!r}")
    cats = [parse_category(p) for p in parts]
    if len(set(cats)) != len(cats):
        raise InventoryError(f"duplicate category in knowledge source {text!r}")
    return KnowledgeSource(tuple(cats))


ALL_CATEGORIES = KnowledgeSource(CATEGORY_ORDER)


@dataclass(frozen=True)
class AttributeTuple:
    """The attribute description of one segment.

    Height and backness are present iff the segment is a vowel (manner and
    place both "vowel"); consonants carry None there.  Every segment has a
    voicing and an aspiration value.
    """

    manner: str
    place: str
    voicing: str
    aspiration: str
    height: Optional[str] = None
    backness: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "manner", canonical_value(Category.MANNER, self.manner))
        object.__setattr__(self, "place", canonical_value(Category.PLACE, self.place))
        object.__setattr__(self, "voicing", canonical_value(Category.VOICING, self.voicing))
        object.__setattr__(
            self, "aspiration", canonical_value(Category.ASPIRATION, self.aspiration)
        )
        vowel = self.manner == "vowel"
        if vowel != (self.place == "vowel"):
            raise InventoryError(
                "manner and place must both be 'vowel' or neither: "
                f"{self.manner}/{self.place}"
            )
        if vowel:
            if self.height is None or self.backness is None:
                raise InventoryError("vowel segments need height and backness")
            object.__setattr__(
                self, "height", canonical_value(Category.HEIGHT, self.height)
            )
            object.__setattr__(
                self, "backness", canonical_value(Category.BACKNESS, self.backness)
            )
        else:
            if self.height is not None or self.backness is not None:
                raise InventoryError("consonant segments cannot carry height/backness")

    @property
    def is_vowel(self) -> bool:
        return self.manner == "vowel"

    def value(self, category: Category) -> Optional[str]:
        return getattr(self, category.name.lower())

    def project(self, ks: KnowledgeSource) -> tuple[Optional[str], ...]:
        """Restrict to the ks categories, keeping None as the absent marker."""
        return tuple(self.value(cat) for cat in ks)
