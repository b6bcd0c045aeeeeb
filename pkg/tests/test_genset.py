import pytest
from hypothesis import given, settings, strategies as st

from _gen import random_family, random_point, rng
from stonespace.closure import closure
from stonespace.constructions import DisjointnessError, adjoin_dense, dense_family, discretize
from stonespace.core import Clopen, Layout, Point, StoneSpaceError
from stonespace.family import (
    Family,
    embed_track,
    family_cardinality,
    family_equal,
    family_meet_closed,
    family_minus_closed,
    family_restrict,
    family_union,
    sigma_class,
    single_track,
)
from stonespace.genset import (
    CONDITION_NAMES,
    decompose,
    decomposition_report,
    dichotomy_check,
    dichotomy_report,
    finite_extension_preserves,
    generating_status,
    is_generating,
    least_generating_set,
    theorem_conditions,
    union_least_gen_criterion,
)
from stonespace.oracle import brute_force_status
from stonespace.safety import ClosedSet

P = Point.parse
ONE = Layout(("R",))
RUNS = single_track("1*", "0")
CANTOR = single_track("(0+1)*", "0")
TWO = Layout(("P", "Q"))
DENSE_Q = embed_track(CANTOR, TWO, "Q")
TAGGED = discretize(DENSE_Q, "P")
seeds = st.integers(0, 10**9)


def test_status_examples():
    C = closure(RUNS)
    assert generating_status(C, RUNS) == "least"
    with_limit = family_union([RUNS, Family.from_points(ONE, [P("|1")])])
    assert generating_status(C, with_limit) == "generating"
    assert generating_status(ClosedSet.full(ONE), CANTOR) == "generating"
    assert generating_status(C, Family.from_points(ONE, [P("|1")])) == "none"
    with pytest.raises(StoneSpaceError):
        generating_status(C, Family.from_points(ONE, [P("01|0")]))


def test_least_set_examples():
    v = least_generating_set(closure(TAGGED))
    assert v.exists and family_equal(v.least, TAGGED)
    assert all(v.conditions.values())
    v = least_generating_set(ClosedSet.full(ONE))
    assert not v.exists and v.least is None
    assert ClosedSet.full(ONE).contains(v.witness)
    assert not any(v.conditions.values())
    v = least_generating_set(closure(family_union([DENSE_Q, TAGGED])))
    assert v.exists and family_equal(v.least, TAGGED)


def test_verdict_json_lists_all_conditions():
    out = least_generating_set(closure(RUNS)).to_json()
    assert out["exists"] is True and out["witness"] is None
    assert list(out["conditions"]) == list(CONDITION_NAMES) and len(CONDITION_NAMES) == 6
    assert out["least_cardinality"] == "aleph0"


def test_relative_least_set_ignores_the_class():
    one_hot = single_track("0*1", "0")
    E = sigma_class(ONE, [])
    v = least_generating_set(closure(one_hot), E)
    assert v.exists and family_equal(v.least, one_hot)
    # the class may swallow the non-isolated part entirely
    v = least_generating_set(ClosedSet.full(ONE), ClosedSet.full(ONE))
    assert v.exists and v.least.is_empty()


def test_decompose_examples():
    t0, t1 = decompose(closure(RUNS))
    assert family_equal(t0, RUNS) and t1.is_empty()
    finite = Family.from_points(ONE, [P("1|0"), P("|01"), P("0|1")])
    t0, t1 = decompose(closure(finite))
    assert family_equal(t0, finite) and t1.is_empty()
    # the tagged members already generate, so nothing is left for T1
    t0, t1 = decompose(closure(TAGGED))
    assert family_equal(t0, TAGGED) and t1.is_empty()
    t0, t1 = decompose(ClosedSet.full(ONE))
    assert t0.is_empty() and not family_cardinality(t1).is_finite
    assert closure(t1) == ClosedSet.full(ONE)
    assert all(decomposition_report(closure(adjoin_dense(Family.of(TWO, []), "Q"))).values())


def test_dichotomy_examples():
    assert dichotomy_check(RUNS)
    rep = dichotomy_report(TAGGED)
    assert rep.spectrum.level == 2 and rep.least_exists and rep.tree_valid and rep.holds
    rep = dichotomy_report(CANTOR)
    assert not rep.least_exists and rep.tree_valid


def test_finite_extension_examples():
    C = closure(RUNS)
    assert finite_extension_preserves(RUNS, C, Family.from_points(ONE, [P("01|0")]))
    G = family_union([RUNS, Family.from_points(ONE, [P("|1")])])
    assert finite_extension_preserves(G, C, Family.from_points(ONE, [P("01|0"), P("|0101")]))
    with pytest.raises(StoneSpaceError):
        finite_extension_preserves(RUNS, C, single_track("0*1", "1"))
    with pytest.raises(StoneSpaceError):
        finite_extension_preserves(RUNS, C, Family.from_points(ONE, [P("1|0")]))


def test_union_criterion_examples():
    k2 = Layout(("A", "B"))
    a, b = (single_track("1*", "0", k2, t) for t in (0, 1))
    rep = union_least_gen_criterion([a, b])
    assert rep.union_has_least and rep.combined and rep.agree and rep.decomposition_ok
    dense = dense_family(k2, 1)
    rep = union_least_gen_criterion([a, dense])
    assert not rep.union_has_least and not rep.combined and rep.agree
    single = union_least_gen_criterion([a])
    assert single.union_has_least == least_generating_set(closure(a)).exists
    with pytest.raises(DisjointnessError) as err:
        union_least_gen_criterion([a, single_track("11*", "0", k2, 0)])
    assert err.value.position == 0


def test_union_criterion_forward_direction_can_fail():
    # The tagged family has a least generating set, yet its part inside the
    # Q-only class is the perfect set of all Q-patterns, which has none.
    rep = union_least_gen_criterion([TAGGED], ["Q"])
    assert rep.union_has_least
    assert not rep.sigma_part_has_least
    assert not rep.agree
    # the relative form still holds
    assert rep.relative_union_has_least and rep.relative_agree


def _random_instance(r):
    layout = Layout(("A", "B")) if r.random() < 0.4 else ONE
    F = random_family(r, layout)
    roll = r.random()
    if roll < 0.4:
        R = ClosedSet.empty(layout)
    elif roll < 0.7:
        R = sigma_class(layout, [t for t in range(layout.k) if r.random() < 0.5])
    else:
        R = closure(random_family(r, layout))
    return F, R


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_conditions_agree(seed):
    r = rng(f"cond{seed}")
    F, R = _random_instance(r)
    C = closure(F)
    candidates = [F, least_generating_set(C, R).candidate]
    iso = least_generating_set(C, R)
    if iso.exists:
        candidates.append(family_union([iso.least, family_meet_closed(F, R)]))
    for G in candidates:
        conds = theorem_conditions(C, G, R)
        assert len(set(conds.values())) == 1, conds


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_status_matches_exhaustive_search(seed):
    r = rng(f"brute{seed}")
    pts = list({random_point(r, 4, 2) for _ in range(r.randint(1, 6))})
    G = Family.from_points(ONE, pts)
    extra = [random_point(r, 4, 2) for _ in range(r.randint(0, 2))]
    C = ClosedSet.of_points(pts + extra) if r.random() < 0.5 else closure(G)
    roll = r.random()
    R = ClosedSet.empty(ONE) if roll < 0.4 else ClosedSet.of_points([random_point(r, 4, 2) for _ in range(3)] + pts[:1])
    if roll > 0.8:
        R = R | closure(single_track("1*", "0"))
    assert brute_force_status(C, pts, R) == generating_status(C, G, R)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_decomposition_guarantees(seed):
    r = rng(f"dec{seed}")
    F, R = _random_instance(r)
    C = closure(F)
    rep = decomposition_report(C, R)
    assert all(rep.values()), rep
    t0, t1 = decompose(C, R)
    assert is_generating(C, family_union([t0, t1]), R)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_subsets_of_least_sets_are_least(seed):
    r = rng(f"sub{seed}")
    F = random_family(r)
    v = least_generating_set(closure(F))
    if not v.exists:
        return
    phi = Clopen.of({i: r.choice((0, 1)) for i in r.sample(range(5), 2)})
    part = family_restrict(v.least, phi)
    w = least_generating_set(closure(part))
    assert w.exists and family_equal(w.least, part)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_dichotomy_on_random_families(seed):
    r = rng(f"dich{seed}")
    F, R = _random_instance(r)
    assert dichotomy_check(F, R)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_finite_extension_on_random_instances(seed):
    r = rng(f"ext{seed}")
    F, R = _random_instance(r)
    C = closure(F)
    outside = [p for p in (random_point(r) for _ in range(10)) if not C.contains(p)][:2]
    if not outside:
        return
    Tf = Family.from_points(F.layout, outside)
    for G in (F, least_generating_set(C, R).candidate):
        assert finite_extension_preserves(G, C, Tf, R)


def test_forward_direction_fails_for_member_reading_too():
    # Reading the class part as "members inside the class" instead of
    # "closure inside the class": the dense Q-patterns alone have no least
    # set, but next to their tagged copies they do.
    DT = family_union([DENSE_Q, TAGGED])
    S = sigma_class(TWO, ["Q"])
    assert least_generating_set(closure(DT)).exists
    assert not least_generating_set(closure(family_meet_closed(DT, S))).exists
    assert least_generating_set(closure(family_minus_closed(DT, S))).exists
