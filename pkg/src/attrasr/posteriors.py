"""Frame-level per-category posterior sets and the APST v1 text format.

Each utterance carries one stream per attribute category.  A stream is a
(frames x classes) row-stochastic matrix whose class list is fixed by the
category: blank first, then the category's values, then an absent-marker
class for height and backness (consonant frames put their mass there).

APST v1 layout::

    APST 1
    utt <id> <frames> <n_categories>
    cat <name> <n_classes>
    <class labels, space separated>
    <frames probability rows, 8 significant digits>
    ... further cat blocks, further utt blocks

Writing a parsed file reproduces it byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import FormatError
from .inventory import CATEGORY_ORDER, VALUES, Category, KnowledgeSource

BLANK = "<blk>"
ABSENT = "<na>"

ROW_SUM_TOL = 1e-6


def class_labels(category: Category) -> tuple[str, ...]:
    """The fixed, ordered class list of a category's posterior stream."""
    labels = (BLANK,) + VALUES[category]
    if category in (Category.HEIGHT, Category.BACKNESS):
        labels = labels + (ABSENT,)
    return labels


BLANK_INDEX = 0


def absent_index(category: Category) -> int:
    if category not in (Category.HEIGHT, Category.BACKNESS):
        raise ValueError(f"{category} has no absent class")
    return len(class_labels(category)) - 1


@dataclass
class CategoryStream:
    """Posterior rows of one category for one utterance."""

    category: Category
    probs: np.ndarray  # (frames, n_classes) float64

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        n_classes = len(class_labels(self.category))
        if self.probs.ndim != 2 or self.probs.shape[1] != n_classes:
            raise FormatError(
                f"{self.category.value} stream needs shape (frames, {n_classes})"
            )
        if np.any(self.probs < 0.0) or np.any(self.probs > 1.0):
            raise FormatError(f"{self.category.value} stream has values outside [0, 1]")
        sums = self.probs.sum(axis=1)
        bad = np.where(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
        if bad.size:
            raise FormatError(
                f"{self.category.value} stream row {int(bad[0])} sums to "
                f"{sums[bad[0]]!r}, not 1"
            )

    @property
    def labels(self) -> tuple[str, ...]:
        return class_labels(self.category)

    @property
    def frames(self) -> int:
        return int(self.probs.shape[0])


@dataclass
class PosteriorSet:
    """All category streams of one utterance."""

    utterance_id: str
    streams: dict[Category, CategoryStream] = field(default_factory=dict)

    def __post_init__(self):
        if not self.utterance_id or any(c.isspace() for c in self.utterance_id):
            raise FormatError(f"bad utterance id {self.utterance_id!r}")
        if not self.streams:
            raise FormatError(f"utterance {self.utterance_id!r} has no streams")
        frames = {s.frames for s in self.streams.values()}
        if len(frames) != 1:
            raise FormatError(
                f"utterance {self.utterance_id!r} has mismatched frame counts {sorted(frames)}"
            )
        for cat, stream in self.streams.items():
            if stream.category is not cat:
                raise FormatError("stream filed under the wrong category")
        # canonical category order
        self.streams = {
            cat: self.streams[cat] for cat in CATEGORY_ORDER if cat in self.streams
        }

    @property
    def frame_count(self) -> int:
        return next(iter(self.streams.values())).frames

    @property
    def categories(self) -> tuple[Category, ...]:
        return tuple(self.streams)

    def has_categories(self, ks: KnowledgeSource) -> bool:
        return all(cat in self.streams for cat in ks)


def _fmt(p: float) -> str:
    return format(p, ".8g")


def write_posteriors(sets: Sequence[PosteriorSet]) -> str:
    lines = ["APST 1"]
    for ps in sets:
        lines.append(f"utt {ps.utterance_id} {ps.frame_count} {len(ps.streams)}")
        for cat, stream in ps.streams.items():
            labels = stream.labels
            lines.append(f"cat {cat.value} {len(labels)}")
            lines.append(" ".join(labels))
            for row in stream.probs:
                lines.append(" ".join(_fmt(p) for p in row))
    return "\n".join(lines) + "\n"


class _Reader:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def peek(self):
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def next(self, what: str) -> str:
        line = self.peek()
        if line is None:
            raise FormatError(f"unexpected end of file, expected {what}")
        self.pos += 1
        return line

    @property
    def lineno(self) -> int:
        return self.pos


def read_posteriors(text: str) -> list[PosteriorSet]:
    rd = _Reader(text)
    magic = rd.next("header")
    if magic != "APST 1":
        raise FormatError(f"line 1: bad header {magic!r}, expected 'APST 1'")
    sets = []
    while True:
        line = rd.peek()
        if line is None:
            break
        parts = line.split()
        if len(parts) != 4 or parts[0] != "utt":
            raise FormatError(f"line {rd.lineno + 1}: expected 'utt <id> <frames> <ncat>'")
        rd.next("utt line")
        utt_id = parts[1]
        try:
            frames, ncat = int(parts[2]), int(parts[3])
        except ValueError:
            raise FormatError(f"line {rd.lineno}: bad utt counts") from None
        if frames < 1 or ncat < 1:
            raise FormatError(f"line {rd.lineno}: frames and categories must be >= 1")
        streams: dict[Category, CategoryStream] = {}
        for _ in range(ncat):
            head = rd.next("cat line").split()
            if len(head) != 3 or head[0] != "cat":
                raise FormatError(f"line {rd.lineno}: expected 'cat <name> <n_classes>'")
            try:
                cat = Category(head[1])
            except ValueError:
                raise FormatError(f"line {rd.lineno}: unknown category {head[1]!r}") from None
            if cat in streams:
                raise FormatError(f"line {rd.lineno}: duplicate category {cat.value}")
            expected = class_labels(cat)
            try:
                n_classes = int(head[2])
            except ValueError:
                raise FormatError(f"line {rd.lineno}: bad class count") from None
            if n_classes != len(expected):
                raise FormatError(
                    f"line {rd.lineno}: {cat.value} has {len(expected)} classes, "
                    f"file says {n_classes}"
                )
            got = tuple(rd.next("class labels").split())
            if got != expected:
                raise FormatError(
                    f"line {rd.lineno}: {cat.value} class labels do not match the inventory"
                )
            rows = np.empty((frames, n_classes), dtype=np.float64)
            for t in range(frames):
                cells = rd.next("probability row").split()
                if len(cells) != n_classes:
                    raise FormatError(
                        f"line {rd.lineno}: expected {n_classes} probabilities"
                    )
                try:
                    rows[t] = [float(c) for c in cells]
                except ValueError:
                    raise FormatError(f"line {rd.lineno}: bad probability") from None
            try:
                streams[cat] = CategoryStream(cat, rows)
            except FormatError as exc:
                raise FormatError(f"utterance {utt_id!r}: {exc}") from None
        sets.append(PosteriorSet(utt_id, streams))
    if not sets:
        raise FormatError("no utterances in posterior file")
    return sets


def value_index(category: Category, value: str | None) -> int:
    """Column of a value in the category's stream; None maps to the absent class."""
    labels = class_labels(category)
    if value is None:
        return absent_index(category)
    try:
        return labels.index(value)
    except ValueError:
        raise FormatError(f"{value!r} is not a class of {category.value}") from None
