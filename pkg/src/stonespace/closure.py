"""E-closure of a family and the topology of the resulting closed set.

Two independent constructions of the closure live here.  :func:`closure`
builds the trimmed automaton of all prefixes of members (a point is in the
closure iff each of its prefixes extends to a member).  :func:`accumulation_set`
instead marks, on the canonical-stem automata, the prefixes below which
infinitely many members remain; its safety part is the set of accumulation
points.  ``closure(F) == F ∪ accumulation_set(F)`` pointwise is a tested
invariant.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

from .automata import BITS, NFA
from .core import ALEPH0, CONTINUUM, Card, Fin, Layout, Point, StoneSpaceError
from .family import (
    Family,
    LassoComponent,
    family_cardinality,
    family_difference,
    family_member,
    family_minus_closed,
    union_all,
)
from .safety import ClosedSet

_ONE_TRACK = Layout(("R",))


def _layout(C: ClosedSet, layout: Layout | None) -> Layout:
    return layout or C.layout or _ONE_TRACK


def closure(F: Family) -> ClosedSet:
    if F.is_empty():
        return ClosedSet.empty(F.layout)
    nfa = NFA()
    start = nfa.add_states(1)
    for comp in F.components:
        stems = comp.stems  # minimized, so every state reaches a final one
        base = nfa.add_states(stems.size)
        for q in range(stems.size):
            for b, t in stems.successors(q):
                nfa.add_edge(base + q, b, base + t)
        nfa.add_edge(start, None, base + stems.initial)
        ring = nfa.add_states(len(comp.cycle))
        for i, b in enumerate(comp.cycle):
            nfa.add_edge(ring + i, b, ring + (i + 1) % len(comp.cycle))
        for f in stems.finals:
            nfa.add_edge(base + f, None, ring)
    nfa.start = start
    dfa = nfa.determinize(BITS)
    return ClosedSet.from_graph(dfa.delta, 0, F.layout)


def accumulation_set(F: Family) -> ClosedSet:
    """Points every neighbourhood of which holds infinitely many members."""
    classes = list(F.canonical.values())
    if not classes:
        return ClosedSet.empty(F.layout)
    infinite = [k.infinite_states() for k in classes]

    def good(state: tuple) -> bool:
        return any(q is not None and q in inf for q, inf in zip(state, infinite))

    start = tuple(k.initial for k in classes)
    ids = {start: 0}
    order = [start]
    rows = []
    i = 0
    while i < len(order):
        cur = order[i]
        row = []
        for b in BITS:
            nxt = tuple(k.step(q, b) for k, q in zip(classes, cur))
            if not good(nxt):
                row.append(None)
                continue
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
            row.append(ids[nxt])
        rows.append(tuple(row))
        i += 1
    if not good(start):
        return ClosedSet.empty(F.layout)
    return ClosedSet.from_graph(rows, 0, F.layout)


def is_accumulation(F: Family, p: Point) -> bool:
    return accumulation_set(F).contains(p)


def closed_member(C: ClosedSet, p: Point) -> bool:
    return C.contains(p)


def isolated_points(C: ClosedSet, layout: Layout | None = None) -> Family:
    """Points of ``C`` that some cylinder pins down alone."""
    layout = _layout(C, layout)
    forced = C.forced_states
    if not forced:
        return Family.empty(layout)
    entries = {0} & forced
    for q in range(C.size):
        if q not in forced:
            entries |= {t for _, t in C.successors(q) if t in forced}
    dfa = C.to_dfa()
    comps = []
    for q in sorted(entries):
        stem, cycle = C.lasso_from(q)
        comps.append(LassoComponent.make(dfa.with_finals({q}).concat_word(stem), cycle))
    return Family.of(layout, comps)


def cb_derivative(C: ClosedSet) -> ClosedSet:
    """``C`` minus its isolated points."""
    return C.remove_states(C.forced_states)


@dataclass(frozen=True)
class Derivative:
    sequence: tuple[ClosedSet, ...]
    rank: int
    kernel: ClosedSet = field(repr=False)

    @property
    def kernel_empty(self) -> bool:
        return self.kernel.is_empty()


def perfect_kernel(C: ClosedSet) -> Derivative:
    seq = [C]
    while True:
        nxt = cb_derivative(seq[-1])
        if nxt == seq[-1]:
            break
        seq.append(nxt)
    return Derivative(tuple(seq), len(seq) - 1, seq[-1])


def scattered_points(C: ClosedSet, layout: Layout | None = None) -> Family:
    """``C`` minus its perfect kernel, as a family (countable by construction)."""
    layout = _layout(C, layout)
    d = perfect_kernel(C)
    return union_all(layout, (isolated_points(D, layout) for D in d.sequence[:-1]))


def closed_cardinality(C: ClosedSet) -> Card:
    d = perfect_kernel(C)
    if not d.kernel.is_empty():
        return CONTINUUM
    if d.rank >= 2:
        return ALEPH0
    return family_cardinality(isolated_points(C))


def closed_diff_cardinality(C: ClosedSet, S: Family | ClosedSet) -> Card:
    """``|C \\ S|`` exactly; ``S`` may be a family or another closed set."""
    d = perfect_kernel(C)
    if isinstance(S, ClosedSet):
        if not d.kernel.issubset(S):
            # a nonempty perfect set minus a closed set is open in it, hence uncountable
            return CONTINUUM
        return family_cardinality(family_minus_closed(scattered_points(C), S))
    if not d.kernel.is_empty():
        return CONTINUUM
    layout = S.layout
    return family_cardinality(family_difference(scattered_points(C, layout), S))


def closed_points(C: ClosedSet, limit: int | None = None) -> Iterator[Point]:
    """Enumerate the points of a countable closed set."""
    d = perfect_kernel(C)
    if not d.kernel.is_empty():
        raise StoneSpaceError("closed set is uncountable")
    yield from scattered_points(C).points(limit)


# -- 2-trees ------------------------------------------------------------------


@dataclass(frozen=True)
class TreeNode:
    prefix: str
    children: tuple[TreeNode, ...] = ()

    def leaves(self) -> list[str]:
        if not self.children:
            return [self.prefix]
        return [leaf for c in self.children for leaf in c.leaves()]

    def to_json(self) -> dict:
        return {"prefix": self.prefix, "children": [c.to_json() for c in self.children]}

    def depth(self) -> int:
        return 0 if not self.children else 1 + max(c.depth() for c in self.children)


def _nearest_branch(K: ClosedSet, q: int) -> str:
    seen = {q: ""}
    queue = deque([q])
    while queue:
        s = queue.popleft()
        if s in K.branching_states:
            return seen[s]
        for b, t in K.successors(s):
            if t not in seen:
                seen[t] = seen[s] + b
                queue.append(t)
    raise StoneSpaceError("no branching below this state; set is not perfect here")


def two_tree(C: ClosedSet, depth: int, avoid: ClosedSet | None = None) -> TreeNode | None:
    """Binary tree of pairwise incompatible cylinders inside the perfect kernel.

    With ``avoid`` given, every cylinder misses that closed set.  Returns
    ``None`` when the kernel lies inside ``avoid`` (or is empty).
    """
    K = perfect_kernel(C).kernel
    if K.is_empty():
        return None
    root = "" if avoid is None else K.first_escape(avoid)
    if root is None:
        return None

    def build(prefix: str, level: int) -> TreeNode:
        if level == 0:
            return TreeNode(prefix)
        q = K.run(prefix)
        path = _nearest_branch(K, q)
        return TreeNode(prefix, tuple(build(prefix + path + b, level - 1) for b in BITS))

    return build(root, depth)


def verify_two_tree(tree: TreeNode, C: ClosedSet, depth: int, avoid: ClosedSet | None = None) -> bool:
    """Check shape, incompatibility and that every leaf cylinder meets ``C``'s kernel."""
    K = perfect_kernel(C).kernel

    def ok(node: TreeNode, level: int) -> bool:
        if not K.has_prefix(node.prefix):
            return False
        if avoid is not None and avoid.has_prefix(node.prefix):
            return False
        if level == 0:
            return not node.children
        if len(node.children) != 2:
            return False
        a, b = node.children
        if not (a.prefix.startswith(node.prefix) and b.prefix.startswith(node.prefix)):
            return False
        if a.prefix.startswith(b.prefix) or b.prefix.startswith(a.prefix):
            return False
        return ok(a, level - 1) and ok(b, level - 1)

    leaves = tree.leaves()
    pairwise = all(
        not x.startswith(y) for i, x in enumerate(leaves) for j, y in enumerate(leaves) if i != j
    )
    return ok(tree, depth) and len(leaves) == 2**depth and pairwise


def point_in_family_or_limit(F: Family, p: Point) -> bool:
    return family_member(F, p) or is_accumulation(F, p)
