"""Value types shared by every other module.

Points of Cantor space are ultimately periodic bit sequences; bit ``i``
says whether predicate ``R_i`` is nonempty.  A :class:`Layout` groups the
positions into ``k`` interleaved tracks: track ``t`` owns ``t, t+k, t+2k, ...``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Sequence


class StoneSpaceError(ValueError):
    """Rejected input.  Subclasses carry more detail where useful."""


def _check_bits(s: str, what: str) -> None:
    if any(ch not in "01" for ch in s):
        raise StoneSpaceError(f"{what} must be a bit string, got {s!r}")


def primitive_root(word: str) -> str:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


def least_rotation(word: str) -> str:
    return min(word[i:] + word[:i] for i in range(len(word)))


def rotate(word: str, j: int) -> str:
    j %= len(word)
    return word[j:] + word[:j]


@dataclass(frozen=True)
class Layout:
    track_names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.track_names)
        object.__setattr__(self, "track_names", names)
        if not names:
            raise StoneSpaceError("a layout needs at least one track")
        if any(not n for n in names):
            raise StoneSpaceError("track names must be nonempty")
        if len(set(names)) != len(names):
            raise StoneSpaceError(f"duplicate track names in {names}")

    @property
    def k(self) -> int:
        return len(self.track_names)

    def track_index(self, name: str | int) -> int:
        if isinstance(name, int):
            if not 0 <= name < self.k:
                raise StoneSpaceError(f"track index {name} out of range")
            return name
        try:
            return self.track_names.index(name)
        except ValueError:
            raise StoneSpaceError(f"unknown track {name!r}") from None

    def tracks(self, names: Iterable[str | int]) -> frozenset[int]:
        return frozenset(self.track_index(n) for n in names)

    def track_of(self, position: int) -> int:
        return position % self.k

    def position(self, track: str | int, m: int) -> int:
        """Absolute position of the ``m``-th predicate on ``track``."""
        return self.track_index(track) + self.k * m


@dataclass(frozen=True)
class Point:
    """The sequence ``stem + cycle + cycle + ...`` in canonical form.

    Use :func:`point_normalize` (or :meth:`parse`) to build one; the
    constructor trusts its arguments.
    """

    stem: str
    cycle: str

    def bit(self, i: int) -> int:
        if i < len(self.stem):
            return int(self.stem[i])
        return int(self.cycle[(i - len(self.stem)) % len(self.cycle)])

    def prefix(self, n: int) -> str:
        return "".join(str(self.bit(i)) for i in range(n))

    def suffix(self, n: int) -> Point:
        """The point obtained by dropping the first ``n`` bits."""
        if n <= len(self.stem):
            return point_normalize(self.stem[n:], self.cycle)
        return point_normalize("", rotate(self.cycle, n - len(self.stem)))

    @classmethod
    def parse(cls, text: str) -> Point:
        text = text.strip()
        if text.count("|") != 1:
            raise StoneSpaceError(f"point must look like 'stem|cycle', got {text!r}")
        stem, cycle = text.split("|")
        return point_normalize(stem, cycle)

    def __str__(self) -> str:
        return f"{self.stem}|{self.cycle}"


def point_normalize(stem: str, cycle: str) -> Point:
    _check_bits(stem, "stem")
    _check_bits(cycle, "cycle")
    if not cycle:
        raise StoneSpaceError("cycle must be nonempty")
    cycle = primitive_root(cycle)
    # roll the cycle back into the stem as far as possible
    while stem and stem[-1] == cycle[-1]:
        stem = stem[:-1]
        cycle = cycle[-1] + cycle[:-1]
    return Point(stem, cycle)


@dataclass(frozen=True)
class Clopen:
    """A finite union of cylinders.

    Each conjunct is a sorted tuple of ``(position, bit)`` pairs.  The empty
    conjunct is the whole space; a clopen with no conjuncts is empty.
    """

    conjuncts: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        cleaned = []
        for conj in self.conjuncts:
            conj = tuple(sorted(set((int(p), int(b)) for p, b in conj)))
            positions = [p for p, _ in conj]
            if len(set(positions)) != len(positions):
                raise StoneSpaceError(f"conflicting constraints in {conj}")
            if any(p < 0 or b not in (0, 1) for p, b in conj):
                raise StoneSpaceError(f"bad constraint in {conj}")
            cleaned.append(conj)
        object.__setattr__(self, "conjuncts", tuple(cleaned))

    @classmethod
    def of(cls, *conjuncts: Iterable[tuple[int, int]] | dict) -> Clopen:
        out = []
        for c in conjuncts:
            out.append(tuple(c.items()) if isinstance(c, dict) else tuple(c))
        return cls(tuple(out))

    @classmethod
    def cylinder(cls, prefix: str, offset: int = 0) -> Clopen:
        _check_bits(prefix, "prefix")
        return cls(((tuple((offset + i, int(b)) for i, b in enumerate(prefix))),))

    @classmethod
    def whole(cls) -> Clopen:
        return cls(((),))

    @property
    def depth(self) -> int:
        """One past the largest constrained position."""
        return max((p + 1 for conj in self.conjuncts for p, _ in conj), default=0)

    def matches(self, p: Point) -> bool:
        return any(all(p.bit(pos) == b for pos, b in conj) for conj in self.conjuncts)

    @classmethod
    def parse(cls, text: str) -> Clopen:
        text = text.strip()
        if not text:
            return cls.whole()
        conjuncts = []
        for part in text.split(";"):
            conj = []
            for item in filter(None, (s.strip() for s in part.split(","))):
                pos, _, bit = item.partition("=")
                try:
                    conj.append((int(pos), int(bit)))
                except ValueError:
                    raise StoneSpaceError(f"bad constraint {item!r}") from None
            conjuncts.append(tuple(conj))
        return cls(tuple(conjuncts))

    def __str__(self) -> str:
        return ";".join(",".join(f"{p}={b}" for p, b in conj) for conj in self.conjuncts)


def cylinder_match(c: Clopen, p: Point) -> bool:
    return c.matches(p)


@total_ordering
@dataclass(frozen=True)
class Card:
    """Exact cardinality: ``Fin(n)``, ``ALEPH0`` or ``CONTINUUM``."""

    level: int  # 0 finite, 1 countably infinite, 2 continuum
    n: int = 0

    def __lt__(self, other: Card) -> bool:
        return (self.level, self.n) < (other.level, other.n)

    @property
    def is_finite(self) -> bool:
        return self.level == 0

    @property
    def is_countable(self) -> bool:
        return self.level < 2

    def __add__(self, other: Card) -> Card:
        return card_sum([self, other])

    def __str__(self) -> str:
        return str(self.n) if self.level == 0 else ("aleph0" if self.level == 1 else "continuum")

    def __repr__(self) -> str:
        return f"Fin({self.n})" if self.level == 0 else str(self).capitalize()

    @classmethod
    def parse(cls, text: str) -> Card:
        text = text.strip().lower()
        if text in ("aleph0", "aleph_0", "ω", "omega"):
            return ALEPH0
        if text in ("continuum", "2^aleph0", "2^omega"):
            return CONTINUUM
        try:
            return Fin(int(text))
        except ValueError:
            raise StoneSpaceError(f"not a cardinal: {text!r}") from None


def Fin(n: int) -> Card:
    if n < 0:
        raise StoneSpaceError("negative cardinal")
    return Card(0, n)


ALEPH0 = Card(1)
CONTINUUM = Card(2)


def card_sum(values: Sequence[Card]) -> Card:
    values = list(values)
    if all(v.is_finite for v in values):
        return Fin(sum(v.n for v in values))
    return max(values)
