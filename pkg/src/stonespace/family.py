"""Countable theory families as finite unions of lasso components.

A component ``<L, c>`` denotes ``{w c c c ... : w in L}``.  Different stems
can denote the same point (``1`` and ``11`` both give ``1^ω`` with cycle
``1``), so every counting or comparison question goes through the
*canonical form*: for each primitive cycle class, fixed to its least
rotation ``r``, the regular language of shortest stems ``v`` with the
point equal to ``v r r r ...``.  Those stems are in bijection with points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce
from itertools import islice, repeat
from math import lcm
from typing import Iterable, Iterator, Sequence

from .automata import BITS, DFA
from .core import (
    ALEPH0,
    Card,
    Clopen,
    Fin,
    Layout,
    Point,
    StoneSpaceError,
    least_rotation,
    point_normalize,
    primitive_root,
    rotate,
)
from .safety import ClosedSet


class LayoutMismatch(StoneSpaceError):
    pass


@dataclass(frozen=True)
class LassoComponent:
    stems: DFA
    cycle: str

    @classmethod
    def make(cls, stems: DFA | str, cycle: str) -> LassoComponent:
        if isinstance(stems, str):
            stems = DFA.from_regex(stems)
        if not cycle or any(ch not in "01" for ch in cycle):
            raise StoneSpaceError(f"cycle must be a nonempty bit string, got {cycle!r}")
        return cls(stems.minimize(), primitive_root(cycle))

    def is_empty(self) -> bool:
        return self.stems.is_empty()


@dataclass(frozen=True)
class Family:
    layout: Layout
    components: tuple[LassoComponent, ...]
    # set by disjoint_e_union: the sub-signature the members were certified against
    certificate: frozenset[int] | None = field(default=None, compare=False)

    @classmethod
    def of(cls, layout: Layout, components: Iterable[LassoComponent]) -> Family:
        comps = tuple(c for c in components if not c.is_empty())
        return cls(layout, comps)

    @classmethod
    def from_points(cls, layout: Layout, points: Iterable[Point]) -> Family:
        return cls.of(layout, [LassoComponent.make(DFA.from_words([p.stem]), p.cycle) for p in points])

    @classmethod
    def empty(cls, layout: Layout) -> Family:
        return cls(layout, ())

    @cached_property
    def canonical(self) -> dict[str, DFA]:
        """Cycle class -> minimal automaton of canonical stems."""
        out: dict[str, DFA] = {}
        for comp in self.components:
            r = least_rotation(comp.cycle)
            k = _canonical_stems(comp.stems, comp.cycle, r)
            out[r] = (out[r] | k) if r in out else k
        return {r: out[r] for r in sorted(out) if not out[r].is_empty()}

    def is_empty(self) -> bool:
        return not self.canonical

    def __contains__(self, p: Point) -> bool:
        return family_member(self, p)

    def points(self, limit: int | None = None) -> Iterator[Point]:
        """Distinct members, class by class in round-robin, stems in shortlex order."""
        gens = [zip(repeat(r), k.words()) for r, k in self.canonical.items()]
        produced = 0
        while gens:
            alive = []
            for g in gens:
                item = next(g, None)
                if item is None:
                    continue
                alive.append(g)
                r, v = item
                yield point_normalize(v, r)
                produced += 1
                if limit is not None and produced >= limit:
                    return
            gens = alive

    def __repr__(self) -> str:
        return f"Family(k={self.layout.k}, components={len(self.components)})"


_SUFFIX_CACHE: dict[str, DFA] = {}


def _ends_with(word: str) -> DFA:
    if word not in _SUFFIX_CACHE:
        _SUFFIX_CACHE[word] = DFA.from_regex(f"(0+1)*{word}")
    return _SUFFIX_CACHE[word]


def _canonical_stems(stems: DFA, cycle: str, r: str) -> DFA:
    j = next(i for i in range(len(r)) if rotate(r, i) == cycle)
    # w cycle^ω = (w + r[j:]) r^ω; then strip trailing copies of r
    shifted = stems.concat_word(r[j:]) if j else stems
    return shifted.right_quotient_star(r) - _ends_with(r)


def _canonical_key(p: Point) -> tuple[str, str]:
    r = least_rotation(p.cycle)
    j = next(i for i in range(len(r)) if rotate(r, i) == p.cycle)
    v = p.stem + r[j:] if j else p.stem
    while v.endswith(r):
        v = v[: -len(r)]
    return r, v


def family_from_canonical(layout: Layout, canon: dict[str, DFA]) -> Family:
    return Family.of(layout, [LassoComponent(k, r) for r, k in sorted(canon.items())])


def _same_layout(fs: Sequence[Family]) -> Layout:
    layouts = {f.layout for f in fs}
    if len(layouts) > 1:
        raise LayoutMismatch(f"families use different layouts: {sorted(l.track_names for l in layouts)}")
    return fs[0].layout


# -- the operations --------------------------------------------------------


def family_member(F: Family, p: Point) -> bool:
    r, v = _canonical_key(p)
    k = F.canonical.get(r)
    return k is not None and k.accepts(v)


def family_cardinality(F: Family) -> Card:
    total = 0
    for k in F.canonical.values():
        n = k.count()
        if n is None:
            return ALEPH0
        total += n
    return Fin(total)


def _clopen_stems(conj: tuple[tuple[int, int], ...], cycle: str) -> DFA:
    """Stems ``w`` with ``w cycle^ω`` satisfying the conjunct."""
    need = dict(conj)
    depth = max(need, default=-1) + 1
    rows = []
    finals = set()
    for ell in range(depth):
        row = []
        for b in (0, 1):
            row.append(None if need.get(ell, b) != b else ell + 1)
        rows.append(tuple(row))
        if all(int(cycle[(pos - ell) % len(cycle)]) == bit for pos, bit in need.items() if pos >= ell):
            finals.add(ell)
    rows.append((depth, depth))
    finals.add(depth)
    return DFA(BITS, tuple(rows), 0, frozenset(finals))


def family_restrict(F: Family, phi: Clopen) -> Family:
    comps = []
    for comp in F.components:
        for conj in phi.conjuncts:
            comps.append(LassoComponent(comp.stems & _clopen_stems(conj, comp.cycle), comp.cycle))
    return Family.of(F.layout, comps)


def family_union(Fs: Sequence[Family]) -> Family:
    if not Fs:
        raise StoneSpaceError("family_union needs at least one family")
    layout = _same_layout(Fs)
    return Family.of(layout, [c for f in Fs for c in f.components])


def family_difference(A: Family, B: Family) -> Family:
    _same_layout([A, B])
    out = {}
    for r, k in A.canonical.items():
        out[r] = k - B.canonical[r] if r in B.canonical else k
    return family_from_canonical(A.layout, out)


def family_equal(A: Family, B: Family) -> bool:
    _same_layout([A, B])
    return A.canonical == B.canonical


def family_subset(A: Family, B: Family) -> bool:
    return family_difference(A, B).is_empty()


def _split_by_closed(F: Family, R: ClosedSet, inside: bool) -> Family:
    comps = []
    for comp in F.components:
        tail = point_normalize("", comp.cycle)
        stems = comp.stems
        # product of the stem automaton with R's prefix automaton
        ids = {(stems.initial, 0 if not R.is_empty() else None): 0}
        order = list(ids)
        rows = []
        finals = set()
        i = 0
        while i < len(order):
            qs, qr = order[i]
            if qs in stems.finals:
                in_r = qr is not None and R.accepts_from(qr, tail)
                if in_r == inside:
                    finals.add(i)
            row = []
            for b in BITS:
                ts = stems.step(qs, b)
                if ts is None:
                    row.append(None)
                    continue
                nxt = (ts, R.step(qr, b))
                if nxt not in ids:
                    ids[nxt] = len(order)
                    order.append(nxt)
                row.append(ids[nxt])
            rows.append(tuple(row))
            i += 1
        comps.append(LassoComponent(DFA(BITS, tuple(rows), 0, frozenset(finals)).minimize(), comp.cycle))
    return Family.of(F.layout, comps)


def family_meet_closed(F: Family, R: ClosedSet) -> Family:
    """Members of ``F`` lying in the closed set ``R``."""
    return _split_by_closed(F, R, inside=True)


def family_minus_closed(F: Family, R: ClosedSet) -> Family:
    """Members of ``F`` outside the closed set ``R``."""
    return _split_by_closed(F, R, inside=False)


def embed_track(F: Family, layout: Layout, track: str | int) -> Family:
    """Copy a single-track family onto ``track`` of ``layout``; other tracks stay empty."""
    if F.layout.k != 1:
        raise StoneSpaceError("embed_track expects a family over a one-track layout")
    t = layout.track_index(track)
    h = {b: "0" * t + b + "0" * (layout.k - 1 - t) for b in BITS}
    comps = [
        LassoComponent.make(comp.stems.image(h), "".join(h[b] for b in comp.cycle))
        for comp in F.components
    ]
    return Family.of(layout, comps)


def single_track(stem_regex: str, cycle: str, layout: Layout | None = None, track: str | int = 0) -> Family:
    """Family of one component; with ``layout`` given, placed on ``track``."""
    base = Family.of(Layout(("R",)), [LassoComponent.make(stem_regex, cycle)])
    if layout is None:
        return base
    return embed_track(base, layout, track)


# -- occupied positions ----------------------------------------------------


@dataclass(frozen=True)
class UPSet:
    """Ultimately periodic set of naturals.

    ``n < threshold`` is a member iff ``n in head``; ``n >= threshold`` is a
    member iff ``n % period in residues``.
    """

    threshold: int
    period: int
    head: frozenset[int]
    residues: frozenset[int]

    def __contains__(self, n: int) -> bool:
        if n < self.threshold:
            return n in self.head
        return n % self.period in self.residues

    @classmethod
    def residue_classes(cls, modulus: int, residues: Iterable[int]) -> UPSet:
        return cls(0, modulus, frozenset(), frozenset(r % modulus for r in residues))

    def __and__(self, other: UPSet) -> UPSet:
        t = max(self.threshold, other.threshold)
        p = lcm(self.period, other.period)
        head = frozenset(n for n in range(t) if n in self and n in other)
        res = frozenset(r for r in range(p) if (n := t + (r - t) % p) in self and n in other)
        return UPSet(t, p, head, res)

    def is_empty(self) -> bool:
        return not self.head and not self.residues

    def first(self) -> int | None:
        if self.head:
            return min(self.head)
        if not self.residues:
            return None
        return min(self.threshold + (r - self.threshold) % self.period for r in self.residues)

    def members(self, upto: int) -> list[int]:
        return [n for n in range(upto) if n in self]

    @property
    def exceptions(self) -> frozenset[int]:
        return self.head


def occupied_positions(F: Family) -> UPSet:
    """Positions ``i`` such that some member has bit ``i`` equal to 1."""
    from .closure import closure

    C = closure(F)
    if C.is_empty():
        return UPSet(0, 1, frozenset(), frozenset())
    ones = {q for q in range(C.size) if C.delta[q][1] is not None}
    seen: dict[frozenset[int], int] = {}
    hits = []
    cur = frozenset({0})
    n = 0
    while cur not in seen:
        seen[cur] = n
        hits.append(bool(cur & ones))
        cur = frozenset(t for q in cur for _, t in C.successors(q))
        n += 1
    start = seen[cur]
    period = n - start
    head = frozenset(i for i in range(start) if hits[i])
    residues = frozenset(i % period for i in range(start, n) if hits[i])
    return UPSet(start, period, head, residues)


def track_positions(layout: Layout, tracks: Iterable[int]) -> UPSet:
    return UPSet.residue_classes(layout.k, tracks)


def sigma_class(layout: Layout, tracks: Iterable[str | int]) -> ClosedSet:
    """All points vanishing outside the given tracks (the class of Σ₀-theories)."""
    keep = layout.tracks(tracks)
    k = layout.k
    rows = [((t + 1) % k, (t + 1) % k if t in keep else None) for t in range(k)]
    return ClosedSet.from_graph(rows, 0, layout)


def families_points(Fs: Iterable[Family], per_family: int) -> list[Point]:
    return [p for f in Fs for p in islice(f.points(), per_family)]


def union_all(layout: Layout, Fs: Iterable[Family]) -> Family:
    Fs = list(Fs)
    return reduce(lambda a, b: family_union([a, b]), Fs, Family.empty(layout))
