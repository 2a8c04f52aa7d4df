"""Chord diagrams: how the semi-branches of a germ meet a small circle.

A diagram on ``n`` branches is written as the word of chord labels met going
round the circle, relabelled in order of first occurrence (``aabccb``). Two
words describe the same diagram when they differ by a rotation or a
reflection of the circle; the canonical word is the least one over all of
them.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

__all__ = [
    "ChordDiagram",
    "ChordError",
    "canonical_chord",
    "enumerate_chords",
    "diagrams_for_class",
    "CLASS_DIAGRAMS",
]


class ChordError(ValueError):
    pass


@dataclass(frozen=True)
class ChordDiagram:
    """A fixpoint-free involution ``matching`` on positions ``0 .. 2n-1``."""

    matching: tuple[int, ...]

    def __post_init__(self):
        m = self.matching
        if len(m) % 2:
            raise ChordError("a chord diagram has an even number of points")
        for i, j in enumerate(m):
            if not 0 <= j < len(m) or j == i or m[j] != i:
                raise ChordError(f"position {i} is not matched properly")

    @property
    def n(self) -> int:
        return len(self.matching) // 2

    @classmethod
    def from_word(cls, word: str) -> ChordDiagram:
        where: dict[str, list[int]] = {}
        for i, ch in enumerate(word):
            where.setdefault(ch, []).append(i)
        match = [0] * len(word)
        for ch, spots in where.items():
            if len(spots) != 2:
                raise ChordError(f"label {ch!r} must occur exactly twice")
            a, b = spots
            match[a], match[b] = b, a
        return cls(tuple(match))

    def word(self) -> str:
        return _word(self.matching)


def _word(matching) -> str:
    labels: dict[int, str] = {}
    out = []
    letters = iter(string.ascii_lowercase + string.ascii_uppercase)
    for i, j in enumerate(matching):
        if i not in labels:
            labels[i] = labels[j] = next(letters)
        out.append(labels[i])
    return "".join(out)


def _images(matching):
    size = len(matching)
    for shift in range(size):
        for reflect in (False, True):
            if reflect:
                pos = [(shift - i) % size for i in range(size)]
            else:
                pos = [(shift + i) % size for i in range(size)]
            inv = {p: i for i, p in enumerate(pos)}
            yield tuple(inv[matching[pos[i]]] for i in range(size))


def canonical_chord(d: ChordDiagram | str) -> str:
    """Least first-occurrence word over all rotations and reflections."""
    if isinstance(d, str):
        d = ChordDiagram.from_word(d)
    return min(_word(m) for m in _images(d.matching))


def _matchings(points: list[int]):
    if not points:
        yield {}
        return
    first, rest = points[0], points[1:]
    for i, other in enumerate(rest):
        for m in _matchings(rest[:i] + rest[i + 1:]):
            m = dict(m)
            m[first] = other
            m[other] = first
            yield m


def enumerate_chords(n: int) -> list[str]:
    """Canonical words of all chord diagrams on ``n`` chords."""
    if n < 1:
        raise ChordError("need at least one chord")
    seen = set()
    for m in _matchings(list(range(2 * n))):
        seen.add(canonical_chord(ChordDiagram(tuple(m[i] for i in range(2 * n)))))
    return sorted(seen)


# Diagrams recorded for the tribranched standard forms with mu' <= 2. A_0 and
# B_0 are the two mu' = 0 classes, xy(x-y) and xy(x-y^2), whose words are read
# off the order of their branches around the origin.
CLASS_DIAGRAMS: dict[str, tuple[str, ...]] = {
    "A_0": ("abcabc",),
    "B_0": ("abcacb",),
    "A_2": ("aabccb",),
    "B_4": ("aabccb",),
    "B_1": ("aabcbc",),
    "C_2": ("aabcbc",),
    "B_2": ("aabbcc", "aabccb"),
    "C_1": ("aabbcc", "aabccb"),
    "C_4": ("aabbcc", "aabccb"),
    "D_2": ("aabbcc", "aabccb"),
    "B_5": ("aabcbc",),
    "C_8": ("aabcbc",),
    "B_12": ("aabccb",),
}


def diagrams_for_class(label: str) -> list[str]:
    """Canonical diagrams recorded for a class label; unknown labels raise."""
    try:
        words = CLASS_DIAGRAMS[label]
    except KeyError:
        raise ChordError(f"no chord data recorded for class {label!r}") from None
    return sorted(canonical_chord(w) for w in words)
