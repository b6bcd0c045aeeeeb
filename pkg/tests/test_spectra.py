import pytest
from hypothesis import given, settings, strategies as st

from _gen import random_disjoint_tuple, random_family, random_point, rng
from stonespace.closure import closure
from stonespace.constructions import discretize
from stonespace.core import ALEPH0, CONTINUUM, Fin, Layout, Point
from stonespace.family import Family, embed_track, family_minus_closed, family_union, sigma_class, single_track
from stonespace.oracle import bounded_points, oracle_accumulation
from stonespace.safety import ClosedSet
from stonespace.spectra import (
    NotClosedError,
    additivity_check,
    e_spectrum_structure,
    e_spectrum_theory,
    relative_closure,
    relative_spectrum,
    singleton_split,
    spectrum_report,
)

P = Point.parse
ONE = Layout(("R",))
RUNS = single_track("1*", "0")
ONE_HOT = single_track("0*1", "0")
CANTOR = single_track("(0+1)*", "0")
TWO = Layout(("P", "Q"))
TAGGED = discretize(embed_track(CANTOR, TWO, "Q"), "P")


def oracle_new_points(F: Family, R: ClosedSet, stem: int = 5, cycle: int = 2) -> set[Point]:
    """Limit points outside ``R`` among the small points, found by cylinder counting."""
    return {p for p in bounded_points(stem, cycle) if oracle_accumulation(F, p) and not R.contains(p)}


def test_structure_spectrum_examples():
    assert e_spectrum_structure(RUNS) == Fin(1)
    assert e_spectrum_structure(Family.from_points(ONE, [P("111|0")])) == Fin(0)
    assert e_spectrum_structure(CANTOR) == CONTINUUM


def test_theory_spectrum_examples():
    assert e_spectrum_theory(RUNS) == Fin(1)
    assert e_spectrum_theory(TAGGED) == CONTINUUM
    assert e_spectrum_theory(Family.from_points(ONE, [P("1|0"), P("|01")])) == Fin(0)


def test_relative_spectrum_examples():
    empty_class = sigma_class(ONE, [])
    assert relative_spectrum(ONE_HOT, empty_class) == Fin(0)
    assert e_spectrum_theory(ONE_HOT) == Fin(1)
    k2 = Layout(("A", "B"))
    runs2 = single_track("1*", "0", k2, 0)
    assert relative_spectrum(runs2, sigma_class(k2, [])) == Fin(1)
    assert oracle_new_points(runs2, sigma_class(k2, [])) == {P("|10")}
    assert relative_spectrum(TAGGED, sigma_class(TWO, [])) == CONTINUUM
    assert relative_spectrum(TAGGED, sigma_class(TWO, ["Q"])) == Fin(0)


def test_oracle_confirms_small_spectra():
    assert oracle_new_points(RUNS, ClosedSet.empty()) == {P("|1")}
    assert oracle_new_points(ONE_HOT, ClosedSet.empty()) == {P("|0")}
    assert oracle_new_points(ONE_HOT, sigma_class(ONE, [])) == set()
    lam = family_union([single_track("1*", "0"), single_track("01*", "0")])
    assert oracle_new_points(lam, sigma_class(ONE, [])) == {P("|1"), P("0|1")}
    assert relative_spectrum(lam, sigma_class(ONE, [])) == Fin(2)


def test_relative_closure():
    rc = relative_closure(ONE_HOT, sigma_class(ONE, []))
    assert P("|0") in rc.base and P("|0") not in rc
    assert P("001|0") in rc
    assert rc.cardinality() == ALEPH0
    assert relative_closure(RUNS, closure(RUNS)).is_empty()
    assert relative_closure(RUNS, ClosedSet.empty()).base == closure(RUNS)
    with pytest.raises(NotClosedError):
        relative_closure(RUNS, RUNS)
    with pytest.raises(NotClosedError):
        relative_spectrum(RUNS, RUNS)


def test_report_json_shape():
    rep = spectrum_report(RUNS, "F", sigma_class(ONE, []), "E").to_json()
    assert rep == {
        "family": "F",
        "spectrum_structure": "1",
        "spectrum_theory": "1",
        "relative": {"class": "E", "value": "1"},
        "witnesses": ["|1"],
    }
    rep = spectrum_report(TAGGED, "T").to_json()
    assert rep["relative"] is None and rep["spectrum_theory"] == "continuum"
    assert len(rep["witnesses"]["two_tree"]["children"]) == 2


def test_additivity_examples():
    k2 = Layout(("A", "B"))
    a, b = (single_track("1*", "0", k2, t) for t in (0, 1))
    rep = additivity_check([a, b])
    assert (rep.lhs, rep.rhs, rep.equal, rep.disjoint) == (Fin(2), Fin(2), True, True)
    k3 = Layout(("X", "Y", "Z"))
    lam = family_union([single_track("1*", "0"), single_track("01*", "0")])
    rep = additivity_check([embed_track(lam, k3, t) for t in range(3)])
    assert rep.lhs == Fin(6) and rep.equal
    split = singleton_split(ONE_HOT)
    assert split.lhs == Fin(1) and split.rhs == Fin(0) and split.relation == ">"
    overlap = additivity_check([RUNS, single_track("11*", "0")])
    assert not overlap.disjoint and overlap.relation == "<"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_relative_with_empty_class_is_theory_spectrum(seed):
    F = random_family(rng(f"rel{seed}"))
    assert relative_spectrum(F, ClosedSet.empty(F.layout)) == e_spectrum_theory(F)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_monotone_in_the_class(seed):
    r = rng(f"mono{seed}")
    F = random_family(r)
    R1 = closure(random_family(r)) if r.random() < 0.7 else ClosedSet.empty(F.layout)
    R2 = R1 | closure(random_family(r))
    assert relative_spectrum(F, R1) >= relative_spectrum(F, R2)
    assert e_spectrum_theory(F) >= relative_spectrum(F, R1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_witnesses_are_new_limit_points(seed):
    r = rng(f"wit{seed}")
    F = random_family(r)
    R = sigma_class(F.layout, [])
    rep = spectrum_report(F, "F", R, "E")
    for p in rep.witnesses:
        assert closure(F).contains(p) and not R.contains(p)
        if len(p.stem) <= 6 and len(p.cycle) <= 3:
            assert oracle_accumulation(F, p)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_small_spectra_bound_oracle_count(seed):
    r = rng(f"count{seed}")
    F = random_family(r)
    value = e_spectrum_theory(F)
    found = oracle_new_points(F, ClosedSet.empty(F.layout), 4, 2)
    if value.is_finite:
        assert len(found) <= value.n


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_closures_split_along_disjoint_families(seed):
    fams, layout, sigma = random_disjoint_tuple(rng(f"split{seed}"))
    S = sigma_class(layout, sigma)
    whole = closure(family_union(fams))
    parts = [closure(F) for F in fams]
    union_of_parts = parts[0]
    for C in parts[1:]:
        union_of_parts = union_of_parts | C
    assert whole == union_of_parts
    # outside the sigma-class the parts do not overlap
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            assert (parts[i] & parts[j]).issubset(S)
