"""Closed subsets of Cantor space as deterministic safety automata.

A closed set ``C`` is stored as the minimal automaton of its prefix
language: every state is reachable and has an infinite continuation, and
the infinite runs are exactly the points of ``C``.  Because the form is
canonical, equality of closed sets is structural equality.

Plain-text export format::

    stonespace-safety 1
    states <n>
    initial 0
    <state> <bit> <target>      # one line per transition
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .automata import BITS, DFA, strongly_connected
from .core import ALEPH0, CONTINUUM, Card, Fin, Layout, Point, StoneSpaceError

Delta = tuple[tuple["int | None", "int | None"], ...]


@dataclass(frozen=True)
class ClosedSet:
    delta: Delta
    layout: Layout | None = field(default=None, compare=False)

    # -- construction ---------------------------------------------------

    @classmethod
    def from_graph(cls, delta, initial: int = 0, layout: Layout | None = None) -> ClosedSet:
        """Safety automaton on an arbitrary (possibly non-live) binary graph."""
        n = len(delta)
        if n == 0:
            return cls((), layout)
        live = set(range(n))
        changed = True
        while changed:
            changed = False
            for q in list(live):
                if not any(t is not None and t in live for t in delta[q]):
                    live.discard(q)
                    changed = True
        if initial not in live:
            return cls((), layout)
        rows = tuple(
            tuple(t if t is not None and t in live else None for t in delta[q]) if q in live else (None, None)
            for q in range(n)
        )
        dfa = DFA(BITS, rows, initial, frozenset(live)).minimize()
        return cls(tuple(tuple(r) for r in dfa.delta), layout)

    @classmethod
    def from_dfa(cls, dfa: DFA, layout: Layout | None = None) -> ClosedSet:
        """Closed set of infinite words all of whose prefixes reach a final state."""
        keep = dfa.finals
        rows = [tuple(t if t in keep else None for t in row) if q in keep else (None, None)
                for q, row in enumerate(dfa.delta)]
        if dfa.initial not in keep:
            return cls((), layout)
        return cls.from_graph(rows, dfa.initial, layout)

    @classmethod
    def empty(cls, layout: Layout | None = None) -> ClosedSet:
        return cls((), layout)

    @classmethod
    def full(cls, layout: Layout | None = None) -> ClosedSet:
        return cls(((0, 0),), layout)

    @classmethod
    def of_points(cls, points: Iterable[Point], layout: Layout | None = None) -> ClosedSet:
        result = cls.empty(layout)
        for p in points:
            result = result | cls.singleton(p, layout)
        return result

    @classmethod
    def singleton(cls, p: Point, layout: Layout | None = None) -> ClosedSet:
        word = p.stem + p.cycle
        rows = []
        for i, b in enumerate(word):
            nxt = i + 1 if i + 1 < len(word) else len(p.stem)
            rows.append((nxt, None) if b == "0" else (None, nxt))
        return cls.from_graph(rows, 0, layout)

    def with_layout(self, layout: Layout | None) -> ClosedSet:
        return ClosedSet(self.delta, layout)

    # -- queries ----------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.delta)

    def is_empty(self) -> bool:
        return not self.delta

    def step(self, q: int | None, bit: str) -> int | None:
        if q is None:
            return None
        return self.delta[q][int(bit)]

    def run(self, word: str, q: int = 0) -> int | None:
        if self.is_empty():
            return None
        cur: int | None = q
        for b in word:
            cur = self.delta[cur][int(b)]
            if cur is None:
                return None
        return cur

    def has_prefix(self, word: str) -> bool:
        return self.run(word) is not None

    def accepts_from(self, q: int | None, p: Point) -> bool:
        """Is ``p`` an infinite run starting in state ``q``?"""
        if q is None or self.is_empty():
            return False
        q = self.run(p.stem, q)
        seen = set()
        while q is not None and q not in seen:
            seen.add(q)
            q = self.run(p.cycle, q)
        return q is not None

    def contains(self, p: Point) -> bool:
        return self.accepts_from(0, p) if self.delta else False

    __contains__ = contains

    def successors(self, q: int) -> list[tuple[str, int]]:
        return [(b, t) for b, t in zip(BITS, self.delta[q]) if t is not None]

    def to_dfa(self) -> DFA:
        if self.is_empty():
            return DFA.empty()
        return DFA(BITS, self.delta, 0, frozenset(range(self.size)))

    # -- boolean structure ----------------------------------------------

    def _combine(self, other: ClosedSet, both: bool) -> ClosedSet:
        layout = self.layout or other.layout
        if self.is_empty() or other.is_empty():
            if both:
                return ClosedSet.empty(layout)
            return (other if self.is_empty() else self).with_layout(layout)
        start = (0, 0)
        ids = {start: 0}
        queue = deque([start])
        rows = []
        while queue:
            pa, pb = queue.popleft()
            row = []
            for i in range(2):
                ta = self.delta[pa][i] if pa is not None else None
                tb = other.delta[pb][i] if pb is not None else None
                if (ta is None or tb is None) if both else (ta is None and tb is None):
                    row.append(None)
                    continue
                nxt = (ta, tb)
                if nxt not in ids:
                    ids[nxt] = len(ids)
                    queue.append(nxt)
                row.append(ids[nxt])
            rows.append(tuple(row))
        return ClosedSet.from_graph(rows, 0, layout)

    def __or__(self, other: ClosedSet) -> ClosedSet:
        return self._combine(other, both=False)

    def __and__(self, other: ClosedSet) -> ClosedSet:
        return self._combine(other, both=True)

    def issubset(self, other: ClosedSet) -> bool:
        """Inclusion of closed sets is inclusion of their prefix languages."""
        if self.is_empty():
            return True
        if other.is_empty():
            return False
        seen = {(0, 0)}
        stack = [(0, 0)]
        while stack:
            pa, pb = stack.pop()
            for i in range(2):
                ta = self.delta[pa][i]
                if ta is None:
                    continue
                tb = other.delta[pb][i]
                if tb is None:
                    return False
                if (ta, tb) not in seen:
                    seen.add((ta, tb))
                    stack.append((ta, tb))
        return True

    __le__ = issubset

    def first_escape(self, other: ClosedSet) -> str | None:
        """Shortest word that is a prefix of ``self`` but not of ``other``."""
        if self.is_empty():
            return None
        if other.is_empty():
            return ""
        seen = {(0, 0): ""}
        queue = deque([(0, 0)])
        while queue:
            pa, pb = queue.popleft()
            w = seen[(pa, pb)]
            for i in range(2):
                ta = self.delta[pa][i]
                if ta is None:
                    continue
                tb = other.delta[pb][i]
                if tb is None:
                    return w + BITS[i]
                if (ta, tb) not in seen:
                    seen[(ta, tb)] = w + BITS[i]
                    queue.append((ta, tb))
        return None

    # -- structure of the live graph -------------------------------------

    @cached_property
    def _sccs(self) -> list[set[int]]:
        return strongly_connected(range(self.size), lambda q: [t for _, t in self.successors(q)])

    def _reaching(self, targets: set[int]) -> set[int]:
        preds: list[list[int]] = [[] for _ in range(self.size)]
        for q in range(self.size):
            for _, t in self.successors(q):
                preds[t].append(q)
        seen = set(targets)
        stack = list(seen)
        while stack:
            q = stack.pop()
            for p in preds[q]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    @cached_property
    def branching_states(self) -> frozenset[int]:
        return frozenset(q for q in range(self.size) if len(self.successors(q)) == 2)

    @cached_property
    def forced_states(self) -> frozenset[int]:
        """States from which exactly one infinite path leaves."""
        return frozenset(set(range(self.size)) - self._reaching(set(self.branching_states)))

    @cached_property
    def _cyclic_states(self) -> set[int]:
        out = set()
        for comp in self._sccs:
            if len(comp) > 1 or any(t in comp for _, t in self.successors(next(iter(comp)))):
                out |= comp
        return out

    @cached_property
    def infinite_states(self) -> frozenset[int]:
        """States below which infinitely many points lie."""
        seeds = {q for q in self.branching_states if q in self._cyclic_states}
        return frozenset(self._reaching(seeds))

    @cached_property
    def perfect_states(self) -> frozenset[int]:
        """States below which continuum many points lie (two cycles in one SCC)."""
        seeds = set()
        for comp in self._sccs:
            for q in comp:
                if sum(1 for _, t in self.successors(q) if t in comp) == 2:
                    seeds |= comp
                    break
        return frozenset(self._reaching(seeds))

    def path_count(self, q: int = 0) -> Card:
        """Number of points below state ``q`` by graph analysis alone."""
        if self.is_empty():
            return Fin(0)
        if q in self.perfect_states:
            return CONTINUUM
        if q in self.infinite_states:
            return ALEPH0
        memo: dict[int, int] = {}

        def go(s: int) -> int:
            if s not in memo:
                memo[s] = 1 if s in self.forced_states else sum(go(t) for _, t in self.successors(s))
            return memo[s]

        return Fin(go(q))

    def lasso_from(self, q: int) -> tuple[str, str]:
        """Lexicographically least infinite path from ``q`` as ``(stem, cycle)``."""
        seen: dict[int, int] = {}
        word = []
        while q not in seen:
            seen[q] = len(word)
            b, q = self.successors(q)[0]
            word.append(b)
        start = seen[q]
        return "".join(word[:start]), "".join(word[start:])

    def lex_least_point(self, prefix: str = "") -> Point | None:
        from .core import point_normalize

        q = self.run(prefix)
        if q is None:
            return None
        stem, cycle = self.lasso_from(q)
        return point_normalize(prefix + stem, cycle)

    def access_words(self) -> dict[int, str]:
        """A shortlex-least word reaching each state."""
        if self.is_empty():
            return {}
        words = {0: ""}
        queue = deque([0])
        while queue:
            q = queue.popleft()
            for b, t in self.successors(q):
                if t not in words:
                    words[t] = words[q] + b
                    queue.append(t)
        return words

    def remove_states(self, drop: Iterable[int]) -> ClosedSet:
        drop = set(drop)
        if 0 in drop:
            return ClosedSet.empty(self.layout)
        rows = [tuple(t if t is not None and t not in drop else None for t in row) for row in self.delta]
        return ClosedSet.from_graph(rows, 0, self.layout)

    # -- text format -----------------------------------------------------

    def to_text(self) -> str:
        lines = ["stonespace-safety 1", f"states {self.size}"]
        if self.delta:
            lines.append("initial 0")
        for q, row in enumerate(self.delta):
            for b, t in zip(BITS, row):
                if t is not None:
                    lines.append(f"{q} {b} {t}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, layout: Layout | None = None) -> ClosedSet:
        lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or lines[0] != "stonespace-safety 1":
            raise StoneSpaceError("not a stonespace safety automaton")
        n = None
        initial = 0
        rows: list[list[int | None]] = []
        for ln in lines[1:]:
            parts = ln.split()
            if parts[0] == "states":
                n = int(parts[1])
                rows = [[None, None] for _ in range(n)]
            elif parts[0] == "initial":
                initial = int(parts[1])
            elif n is not None and len(parts) == 3:
                q, b, t = int(parts[0]), parts[1], int(parts[2])
                if b not in BITS or not (0 <= q < n and 0 <= t < n):
                    raise StoneSpaceError(f"bad transition line {ln!r}")
                rows[q][int(b)] = t
            else:
                raise StoneSpaceError(f"bad line {ln!r}")
        if n is None:
            raise StoneSpaceError("missing 'states' line")
        return cls.from_graph([tuple(r) for r in rows], initial, layout)

    def __repr__(self) -> str:
        return f"ClosedSet(states={self.size})"
