"""Reference checks that avoid the closure machinery.

Closure membership is decided straight from the neighbourhood
characterisation: a point outside the family is a limit of it exactly
when every cylinder around the point holds infinitely many members.  The
counts come from restricting the family to the cylinder and asking whether
the restricted stem languages are infinite, so nothing here builds a
prefix automaton.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .core import Clopen, Point, StoneSpaceError, point_normalize
from .family import Family, family_cardinality, family_member, family_restrict
from .safety import ClosedSet


@dataclass(frozen=True)
class OracleConfig:
    max_stem: int = 6
    max_cycle: int = 3
    cylinder_depth_bound: int | None = None  # None: derived from the family

    def __post_init__(self):
        if self.max_stem < 0 or self.max_cycle < 1:
            raise StoneSpaceError("oracle bounds must be positive")
        if self.cylinder_depth_bound is not None and self.cylinder_depth_bound < 1:
            raise StoneSpaceError("cylinder depth bound must be positive")


def depth_bound(F: Family, p: Point) -> int:
    # past this depth the run of every canonical stem automaton along p is periodic
    n = max((k.size for k in F.canonical.values()), default=1)
    return n * (len(p.cycle) + len(p.stem)) + 1


def _check_bounds(p: Point, cfg: OracleConfig) -> None:
    if len(p.stem) > cfg.max_stem or len(p.cycle) > cfg.max_cycle:
        raise StoneSpaceError(f"point {p} exceeds the oracle bounds")


def oracle_accumulation(F: Family, p: Point, cfg: OracleConfig = OracleConfig()) -> bool:
    """Does every cylinder around ``p`` hold infinitely many members?"""
    _check_bounds(p, cfg)
    bound = cfg.cylinder_depth_bound or depth_bound(F, p)
    for d in range(bound + 1):
        if family_cardinality(family_restrict(F, Clopen.cylinder(p.prefix(d)))).is_finite:
            return False
    return True


def oracle_closure_member(F: Family, p: Point, cfg: OracleConfig = OracleConfig()) -> bool:
    _check_bounds(p, cfg)
    return family_member(F, p) or oracle_accumulation(F, p, cfg)


def bounded_points(max_stem: int, max_cycle: int):
    """Every point with a normalized stem and cycle inside the bounds, each once."""
    seen = set()
    for ls in range(max_stem + 1):
        for lc in range(1, max_cycle + 1):
            for s in range(2**ls):
                for c in range(2**lc):
                    stem = format(s, f"0{ls}b") if ls else ""
                    p = point_normalize(stem, format(c, f"0{lc}b"))
                    if p not in seen and len(p.stem) <= max_stem:
                        seen.add(p)
                        yield p


def brute_force_status(C: ClosedSet, members: Sequence[Point], R: ClosedSet | None = None) -> str:
    """Classify a finite candidate by enumerating all of its subsets.

    Only the definitions are used: a subset generates when ``C`` lies in its
    closed hull together with ``R``; minimality and leastness compare the
    parts of generating subsets lying outside ``R``.  Returns ``least``,
    ``minimal``, ``generating`` or ``none``.
    """
    R = R if R is not None else ClosedSet.empty(C.layout)
    own = [p for p in members if not R.contains(p)]
    kept = [p for p in members if R.contains(p)]

    def generates(subset) -> bool:
        return C.issubset(ClosedSet.of_points(list(subset) + kept, C.layout) | R)

    if not generates(own):
        return "none"
    gens = [set(s) for n in range(len(own) + 1) for s in combinations(own, n) if generates(s)]
    if all(set(own) <= g for g in gens):
        return "least"
    if not any(g < set(own) for g in gens):
        return "minimal"
    return "generating"
