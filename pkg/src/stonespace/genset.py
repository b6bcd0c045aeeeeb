"""Generating sets of closed sets, absolute and relative to a closed class.

A subfamily ``G`` of a closed set ``C`` generates ``C`` relative to ``R``
when ``C ⊆ Cl(G) ∪ R``.  The least relative generating set exists exactly
when the isolated points of ``C`` outside ``R`` already generate; the six
equivalent characterisations are evaluated by separate routes so that
their agreement is a meaningful check rather than a tautology.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .automata import BITS, DFA
from .closure import (
    TreeNode,
    accumulation_set,
    cb_derivative,
    closure,
    isolated_points,
    two_tree,
    verify_two_tree,
)
from .core import CONTINUUM, Card, Layout, Point, StoneSpaceError, point_normalize
from .family import (
    Family,
    LassoComponent,
    family_cardinality,
    family_difference,
    family_equal,
    family_meet_closed,
    family_minus_closed,
    family_union,
    sigma_class,
)
from .safety import ClosedSet

LEAST = "least"
MINIMAL = "minimal"
GENERATING = "generating"
NONE = "none"

CONDITION_NAMES = (
    "least",
    "minimal",
    "isolated_in_closure_with_class",
    "isolated_in_base_with_class",
    "isolated_in_closure",
    "isolated_in_base",
)


def _relativizer(R: ClosedSet | None, layout) -> ClosedSet:
    return ClosedSet.empty(layout) if R is None else R


def is_generating(C: ClosedSet, G: Family, R: ClosedSet | None = None) -> bool:
    R = _relativizer(R, G.layout)
    return C.issubset(closure(G) | R)


def _avoids(F: Family, X: ClosedSet) -> bool:
    return family_meet_closed(F, X).is_empty()


def _limit_part(C: ClosedSet) -> ClosedSet:
    """Points of ``C`` with infinitely many neighbours, via infinite-subtree marking."""
    return C.remove_states(set(range(C.size)) - C.infinite_states)


def theorem_conditions(C: ClosedSet, G: Family, R: ClosedSet | None = None) -> dict[str, bool]:
    """The six equivalent characterisations of a least generating set.

    Each entry is ``False`` when ``G`` does not generate.  The entries are:
    least (no member outside ``R`` is a limit of ``C``), minimal (no member
    outside ``R`` is a limit of ``G``) and four isolation tests against
    ``Cl(G) ∪ R``, ``C ∪ R``, ``Cl(G)`` and ``C``.
    """
    R = _relativizer(R, G.layout)
    gen = is_generating(C, G, R)
    if not gen:
        return dict.fromkeys(CONDITION_NAMES, False)
    own = family_minus_closed(G, R)
    clG = closure(G)
    return {
        "least": _avoids(own, _limit_part(C)),
        "minimal": _avoids(own, accumulation_set(G)),
        "isolated_in_closure_with_class": _avoids(own, cb_derivative(clG | R)),
        "isolated_in_base_with_class": _avoids(own, cb_derivative(C | R)),
        "isolated_in_closure": _avoids(own, cb_derivative(clG)),
        "isolated_in_base": _avoids(own, cb_derivative(C)),
    }


def _require_subset(C: ClosedSet, G: Family) -> None:
    if not family_minus_closed(G, C).is_empty():
        raise StoneSpaceError("generating-set candidate is not contained in the closed set")


def generating_status(C: ClosedSet, G: Family, R: ClosedSet | None = None) -> str:
    """Classify ``G`` as ``least``, ``generating`` or ``none``.

    Minimality and leastness coincide for generating sets of closed sets,
    so ``least`` also covers the minimal case.
    """
    _require_subset(C, G)
    if not is_generating(C, G, R):
        return NONE
    return LEAST if theorem_conditions(C, G, R)["least"] else GENERATING


@dataclass
class GenSetVerdict:
    exists: bool
    least: Family | None
    conditions: dict[str, bool]
    witness: Point | None = None
    candidate: Family | None = field(default=None, repr=False)

    def to_json(self, max_points: int = 8) -> dict:
        return {
            "exists": self.exists,
            "least": None if self.least is None else [str(p) for p in self.least.points(max_points)],
            "least_cardinality": None if self.least is None else str(family_cardinality(self.least)),
            "conditions": {name: self.conditions[name] for name in CONDITION_NAMES},
            "witness": None if self.witness is None else str(self.witness),
        }


def relative_isolated(C: ClosedSet, R: ClosedSet | None = None) -> Family:
    R = _relativizer(R, C.layout)
    return family_minus_closed(isolated_points(C, C.layout), R)


def least_generating_set(C: ClosedSet, R: ClosedSet | None = None) -> GenSetVerdict:
    R = _relativizer(R, C.layout)
    iso = relative_isolated(C, R)
    cover = closure(iso) | R
    if C.issubset(cover):
        return GenSetVerdict(True, iso, theorem_conditions(C, iso, R), candidate=iso)
    prefix = C.first_escape(cover)
    witness = C.lex_least_point(prefix)
    t0, t1 = decompose(C, R)
    candidate = family_union([t0, t1])
    return GenSetVerdict(False, None, theorem_conditions(C, candidate, R), witness, candidate)


# -- decomposition -------------------------------------------------------------


def _product(C: ClosedSet, U: ClosedSet):
    """Reachable pairs of (C-state, U-state or None) with C alive."""
    start = (0, 0 if not U.is_empty() else None)
    ids = {start: 0}
    order = [start]
    rows = []
    i = 0
    while i < len(order):
        qc, qu = order[i]
        row = []
        for b in BITS:
            tc = C.step(qc, b)
            if tc is None:
                row.append(None)
                continue
            nxt = (tc, U.step(qu, b))
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
            row.append(ids[nxt])
        rows.append(tuple(row))
        i += 1
    return order, rows


def _dense_sample(C: ClosedSet, U: ClosedSet) -> Family:
    """Countable family inside ``C \\ U`` meeting every cylinder that meets it."""
    layout = C.layout or Layout(("R",))
    if C.is_empty():
        return Family.empty(layout)
    order, rows = _product(C, U)
    escaped = {i for i, (_, qu) in enumerate(order) if qu is None}
    if not escaped:
        return Family.empty(layout)
    # shortest, then lexicographically least, route from each state into an escaped one
    route = {i: "" for i in escaped}
    preds: dict[int, list[tuple[str, int]]] = {}
    for i, row in enumerate(rows):
        for b, t in zip(BITS, row):
            if t is not None:
                preds.setdefault(t, []).append((b, i))
    queue = deque(sorted(escaped))
    while queue:
        t = queue.popleft()
        for b, i in preds.get(t, ()):
            cand = b + route[t]
            if i not in route:
                route[i] = cand
                queue.append(i)
            elif len(cand) == len(route[i]) and cand < route[i]:
                route[i] = cand
    reach = DFA(BITS, tuple(rows), 0, frozenset())
    comps = []
    for i in sorted(route):
        tail = route[i]
        qc = C.run(tail, order[i][0])
        stem, cycle = C.lasso_from(qc)
        comps.append(LassoComponent.make(reach.with_finals({i}).concat_word(tail + stem), cycle))
    return Family.of(layout, comps)


def decompose(C: ClosedSet, R: ClosedSet | None = None) -> tuple[Family, Family]:
    """Split ``C`` into its isolated part ``T0`` and a dense sample ``T1`` of the rest."""
    R = _relativizer(R, C.layout)
    t0 = relative_isolated(C, R)
    t1 = _dense_sample(C, closure(t0) | R)
    return t0, t1


# -- dichotomy and preservation -------------------------------------------------


@dataclass
class DichotomyReport:
    spectrum: Card
    least_exists: bool
    tree: TreeNode | None
    tree_valid: bool | None

    @property
    def holds(self) -> bool:
        if self.spectrum < CONTINUUM:
            return self.least_exists
        return bool(self.tree_valid)

    def to_json(self) -> dict:
        return {
            "spectrum": str(self.spectrum),
            "least_exists": self.least_exists,
            "holds": self.holds,
            "two_tree": None if self.tree is None else self.tree.to_json(),
            "two_tree_valid": self.tree_valid,
        }


def dichotomy_report(F: Family, R: ClosedSet | None = None, depth: int = 3) -> DichotomyReport:
    from .spectra import relative_spectrum

    R = _relativizer(R, F.layout)
    C = closure(F)
    spec = relative_spectrum(F, R)
    exists = least_generating_set(C | R, R).exists
    tree = valid = None
    if spec == CONTINUUM:
        tree = two_tree(C, depth, avoid=R)
        valid = tree is not None and verify_two_tree(tree, C, depth, avoid=R)
    return DichotomyReport(spec, exists, tree, valid)


def dichotomy_check(F: Family, R: ClosedSet | None = None) -> bool:
    """Countable relative spectrum forces a least generating set; otherwise a 2-tree exists."""
    return dichotomy_report(F, R).holds


def finite_extension_preserves(G: Family, C: ClosedSet, Tf: Family, R: ClosedSet | None = None) -> bool:
    """Leastness of ``G`` for ``C`` survives adding a finite set disjoint from ``C``."""
    R = _relativizer(R, G.layout)
    if not family_cardinality(Tf).is_finite:
        raise StoneSpaceError("finite extension must be finite")
    if not _avoids(Tf, C):
        raise StoneSpaceError("finite extension meets the closed set")
    before = generating_status(C, G, R) == LEAST
    C2 = C | ClosedSet.of_points(Tf.points(), C.layout)
    after = generating_status(C2, family_union([G, Tf]), R) == LEAST
    return before == after


def outside_point(C: ClosedSet, layout=None) -> Point | None:
    """Lexicographically least point outside ``C`` along the shortest escape."""
    full = ClosedSet.full(layout or C.layout)
    prefix = full.first_escape(C)
    if prefix is None:
        return None
    return point_normalize(prefix, "0")


# -- unions ---------------------------------------------------------------------


@dataclass
class UnionCriterionReport:
    union_has_least: bool
    sigma_part_has_least: bool
    parts_have_least: list[bool]
    relative_union_has_least: bool
    decomposition_ok: bool | None

    @property
    def combined(self) -> bool:
        return self.sigma_part_has_least and all(self.parts_have_least)

    @property
    def agree(self) -> bool:
        return self.union_has_least == self.combined

    @property
    def relative_agree(self) -> bool:
        return self.relative_union_has_least == all(self.parts_have_least)

    def to_json(self) -> dict:
        return {
            "union_has_least": self.union_has_least,
            "sigma_part_has_least": self.sigma_part_has_least,
            "parts_have_least": self.parts_have_least,
            "combined": self.combined,
            "agree": self.agree,
            "relative_union_has_least": self.relative_union_has_least,
            "relative_agree": self.relative_agree,
            "decomposition_ok": self.decomposition_ok,
        }


def union_least_gen_criterion(Fs: Sequence[Family], sigma: Sequence[str | int] = ()) -> UnionCriterionReport:
    """Both sides of the union criterion for least generating sets.

    The absolute side compares the union's closure with its ``sigma``-class
    part and the parts' relative least sets; the relative side compares the
    union's relative least set with the per-family ones and checks that it
    splits as their disjoint union.
    """
    from .constructions import require_pairwise_disjoint

    require_pairwise_disjoint(Fs, sigma)
    union = family_union(list(Fs))
    S = sigma_class(union.layout, sigma)
    C = closure(union)
    parts = [least_generating_set(closure(F), S) for F in Fs]
    rel = least_generating_set(C, S)
    decomposition_ok = None
    if rel.exists and all(p.exists for p in parts):
        pieces = [p.least for p in parts]
        pairwise = all(
            family_equal(family_difference(a, b), a) for i, a in enumerate(pieces) for b in pieces[i + 1:]
        )
        decomposition_ok = pairwise and family_equal(rel.least, family_union(pieces))
    return UnionCriterionReport(
        union_has_least=least_generating_set(C).exists,
        sigma_part_has_least=least_generating_set(C & S).exists,
        parts_have_least=[p.exists for p in parts],
        relative_union_has_least=rel.exists,
        decomposition_ok=decomposition_ok,
    )


def decomposition_report(C: ClosedSet, R: ClosedSet | None = None) -> dict[str, bool]:
    """The four guarantees of :func:`decompose`, each checked directly."""
    R = _relativizer(R, C.layout)
    t0, t1 = decompose(C, R)
    hull0 = closure(t0)
    own = least_generating_set(hull0)
    return {
        "t1_avoids_closure_of_t0": _avoids(t1, hull0),
        "t1_empty_or_infinite": t1.is_empty() or not family_cardinality(t1).is_finite,
        "t0_least_for_own_closure": own.exists and family_equal(own.least, t0),
        "generating": C.issubset(closure(family_union([t0, t1])) | R),
    }
