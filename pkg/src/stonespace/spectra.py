"""Absolute and relative e-spectra, relative closures and additivity checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .closure import (
    TreeNode,
    cb_derivative,
    closed_diff_cardinality,
    closure,
    perfect_kernel,
    scattered_points,
    two_tree,
)
from .core import CONTINUUM, Card, Fin, Point, StoneSpaceError, card_sum
from .family import Family, family_cardinality, family_minus_closed, family_union, sigma_class
from .safety import ClosedSet


class NotClosedError(StoneSpaceError):
    pass


def _require_closed(R) -> ClosedSet:
    if not isinstance(R, ClosedSet):
        raise NotClosedError(f"relativizer must be an E-closed set, got {type(R).__name__}")
    return R


@dataclass(frozen=True)
class RelativeClosedSet:
    """``base \\ relativizer``; both parts are closed sets."""

    base: ClosedSet
    relativizer: ClosedSet

    def contains(self, p: Point) -> bool:
        return self.base.contains(p) and not self.relativizer.contains(p)

    __contains__ = contains

    def is_empty(self) -> bool:
        return self.base.issubset(self.relativizer)

    def cardinality(self) -> Card:
        return closed_diff_cardinality(self.base, self.relativizer)


def relative_closure(F: Family, R: ClosedSet) -> RelativeClosedSet:
    return RelativeClosedSet(closure(F), _require_closed(R))


def e_spectrum_structure(F: Family) -> Card:
    """New theories of the given combination: ``|Cl(F) \\ F|``."""
    return closed_diff_cardinality(closure(F), F)


def _new_points(C: ClosedSet, R: ClosedSet) -> Family | None:
    """Non-isolated points of ``C`` outside ``R``; ``None`` when uncountable."""
    if not perfect_kernel(C).kernel.issubset(R):
        return None
    # the kernel of the derivative is the kernel of C, which lies inside R
    return family_minus_closed(scattered_points(cb_derivative(C), C.layout), R)


def relative_spectrum(F: Family, R: ClosedSet) -> Card:
    """Supremum over generating subsets ``G`` of ``|Cl(F) \\ (G ∪ R)|``.

    The smallest generating set in the countable case is the set of
    isolated points, so the supremum is attained there.
    """
    C = closure(F)
    new = _new_points(C, _require_closed(R))
    return CONTINUUM if new is None else family_cardinality(new)


def e_spectrum_theory(F: Family) -> Card:
    return relative_spectrum(F, ClosedSet.empty(F.layout))


@dataclass
class SpectrumReport:
    family: str
    spectrum_structure: Card
    spectrum_theory: Card
    relative_class: str | None = None
    relative: Card | None = None
    witnesses: list[Point] = field(default_factory=list)
    tree: TreeNode | None = None

    def to_json(self) -> dict:
        out = {
            "family": self.family,
            "spectrum_structure": str(self.spectrum_structure),
            "spectrum_theory": str(self.spectrum_theory),
            "relative": None
            if self.relative_class is None
            else {"class": self.relative_class, "value": str(self.relative)},
        }
        if self.tree is not None:
            out["witnesses"] = {"two_tree": self.tree.to_json()}
        else:
            out["witnesses"] = [str(p) for p in self.witnesses]
        return out


def spectrum_report(
    F: Family,
    name: str = "F",
    R: ClosedSet | None = None,
    class_name: str | None = None,
    max_witnesses: int = 8,
) -> SpectrumReport:
    C = closure(F)
    target = R if R is not None else ClosedSet.empty(F.layout)
    report = SpectrumReport(
        family=name,
        spectrum_structure=e_spectrum_structure(F),
        spectrum_theory=e_spectrum_theory(F),
    )
    if R is not None:
        report.relative_class = class_name or "R"
        report.relative = relative_spectrum(F, R)
    new = _new_points(C, target)
    if new is None:
        report.tree = two_tree(C, 3, avoid=target if R is not None else None)
    else:
        report.witnesses = list(new.points(max_witnesses))
    return report


@dataclass
class AdditivityReport:
    lhs: Card
    rhs: Card
    parts: list[Card]
    disjoint: bool
    relative: bool

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    @property
    def relation(self) -> str:
        return "=" if self.lhs == self.rhs else ("<" if self.lhs < self.rhs else ">")

    def to_json(self) -> dict:
        return {
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "parts": [str(p) for p in self.parts],
            "equal": self.equal,
            "relation": self.relation,
            "disjointness": self.disjoint,
            "relative": self.relative,
        }


def additivity_check(Fs: Sequence[Family], sigma: Sequence[str | int] = (), relative: bool = True) -> AdditivityReport:
    """Compare the spectrum of the E-union with the sum of the parts' spectra.

    With ``relative`` the spectra are taken relative to the class of
    theories vanishing outside ``sigma``; otherwise the absolute theory-level
    spectra are used.
    """
    from .constructions import pairwise_disjoint

    if not Fs:
        raise StoneSpaceError("additivity_check needs at least one family")
    union = family_union(list(Fs))
    layout = union.layout
    if relative:
        S = sigma_class(layout, sigma)
        lhs = relative_spectrum(union, S)
        parts = [relative_spectrum(F, S) for F in Fs]
    else:
        lhs = e_spectrum_theory(union)
        parts = [e_spectrum_theory(F) for F in Fs]
    return AdditivityReport(lhs, card_sum(parts), parts, pairwise_disjoint(Fs, sigma), relative)


def singleton_split(F: Family, sample: int = 11) -> AdditivityReport:
    """Absolute additivity for ``F`` split into its singletons.

    A singleton is closed, so each part has spectrum 0 and the sum over any
    number of parts is 0; the first ``sample`` parts are evaluated to
    confirm it.  The left side is the absolute spectrum of ``F`` itself.
    """
    from .constructions import pairwise_disjoint

    parts = [Family.from_points(F.layout, [p]) for p in F.points(sample)]
    values = [e_spectrum_theory(P) for P in parts]
    if any(v != Fin(0) for v in values):
        raise StoneSpaceError("a singleton family reported new theories")
    return AdditivityReport(e_spectrum_theory(F), card_sum(values), values, pairwise_disjoint(parts), False)
