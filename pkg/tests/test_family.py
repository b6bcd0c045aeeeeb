import pytest
from hypothesis import given, settings, strategies as st

from _gen import python_language, random_family, random_point, rng
from stonespace.automata import DFA
from stonespace.core import ALEPH0, Clopen, Fin, Layout, Point, StoneSpaceError, point_normalize
from stonespace.family import (
    Family,
    LassoComponent,
    LayoutMismatch,
    UPSet,
    embed_track,
    family_cardinality,
    family_difference,
    family_equal,
    family_meet_closed,
    family_member,
    family_minus_closed,
    family_restrict,
    family_subset,
    family_union,
    occupied_positions,
    sigma_class,
    single_track,
)
from stonespace.safety import ClosedSet

seeds = st.integers(0, 10**9)
ONE = Layout(("R",))


def brute_member(F: Family, p: Point) -> bool:
    """Try every prefix of ``p`` as a stem, up to a bound past which runs repeat."""
    for comp in F.components:
        bound = len(p.stem) + (comp.stems.size + 1) * len(p.cycle) * len(comp.cycle) + 1
        for m in range(bound + 1):
            w = p.prefix(m)
            if comp.stems.accepts(w) and point_normalize(w, comp.cycle) == p:
                return True
    return False


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_membership_matches_brute_force(seed):
    r = rng(f"member{seed}")
    F = random_family(r)
    for _ in range(25):
        p = random_point(r)
        assert family_member(F, p) == brute_member(F, p), (F, p)
    for p in F.points(10):
        assert brute_member(F, p)


@pytest.mark.parametrize(
    "stem,cycle,expected",
    [
        ("1*", "0", ALEPH0),
        ("1*", "1", Fin(1)),
        ("(01)*", "01", Fin(1)),
        ("(01)*0", "10", Fin(1)),
        ("11*", "1", Fin(1)),
        ("ε+1+11", "0", Fin(3)),
        ("(0+1)(0+1)", "0", Fin(4)),
        ("0*1", "0", ALEPH0),
    ],
)
def test_cardinality_examples(stem, cycle, expected):
    assert family_cardinality(single_track(stem, cycle)) == expected


@settings(max_examples=60, deadline=None)
@given(st.lists(st.text(alphabet="01", max_size=7), max_size=8), st.text(alphabet="01", min_size=1, max_size=3))
def test_finite_cardinality_counts_distinct_points(words, cycle):
    F = Family.of(ONE, [LassoComponent.make(DFA.from_words(words), cycle)])
    assert family_cardinality(F) == Fin(len({point_normalize(w, cycle) for w in words}))


def test_cardinality_of_regex_matches_set_semantics():
    src = "(0+1)(0+ε)1"
    words = python_language(src, 10)
    assert family_cardinality(single_track(src, "01")) == Fin(len({point_normalize(w, "01") for w in words}))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_boolean_operations_pointwise(seed):
    r = rng(f"bool{seed}")
    A, B = random_family(r), random_family(r)
    U, D = family_union([A, B]), family_difference(A, B)
    for _ in range(30):
        p = random_point(r)
        a, b = p in A, p in B
        assert (p in U) == (a or b)
        assert (p in D) == (a and not b)
    assert family_subset(D, A)
    assert family_equal(family_union([D, B]), family_union([A, B]))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_points_are_distinct_members(seed):
    F = random_family(rng(f"pts{seed}"))
    pts = list(F.points(40))
    assert len(pts) == len(set(pts))
    assert all(p in F for p in pts)
    if family_cardinality(F).is_finite:
        assert Fin(len(list(F.points()))) == family_cardinality(F)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_restrict_filters_by_clopen(seed):
    r = rng(f"restrict{seed}")
    F = random_family(r)
    conj = [{i: r.choice((0, 1)) for i in r.sample(range(6), r.randint(1, 3))} for _ in range(r.randint(1, 2))]
    phi = Clopen.of(*conj)
    G = family_restrict(F, phi)
    for p in list(F.points(30)) + [random_point(r) for _ in range(20)]:
        assert (p in G) == (p in F and phi.matches(p))


def test_restrict_example():
    G = family_restrict(single_track("0*1", "0"), Clopen.parse("2=1"))
    assert list(G.points()) == [Point.parse("001|0")]


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_split_by_closed_set(seed):
    r = rng(f"split{seed}")
    F = random_family(r)
    R = ClosedSet.of_points([random_point(r) for _ in range(3)] + list(F.points(3)))
    inside, outside = family_meet_closed(F, R), family_minus_closed(F, R)
    for p in list(F.points(30)) + [random_point(r) for _ in range(10)]:
        assert (p in inside) == (p in F and R.contains(p))
        assert (p in outside) == (p in F and not R.contains(p))


def test_embed_track():
    L = Layout(("P", "Q", "S"))
    F = embed_track(single_track("1*", "0"), L, "Q")
    assert Point.parse("010010|0") in F
    assert Point.parse("010|0") in F
    assert Point.parse("100|0") not in F
    with pytest.raises(StoneSpaceError):
        embed_track(F, L, "P")


def test_layout_mismatch():
    with pytest.raises(LayoutMismatch):
        family_union([single_track("1", "0"), single_track("1", "0", Layout(("A", "B")), 0)])


@pytest.mark.parametrize(
    "stem,cycle,members",
    [
        ("1*", "0", range(40)),
        ("(00)*1", "0", range(0, 40, 2)),
        ("ε", "01", range(1, 40, 2)),
        ("ε+1", "0", [0]),
        ("0*", "0", []),
    ],
)
def test_occupied_positions_examples(stem, cycle, members):
    assert occupied_positions(single_track(stem, cycle)).members(40) == list(members)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_occupied_positions_against_restriction(seed):
    F = random_family(rng(f"occ{seed}"), Layout(("A", "B")))
    occ = occupied_positions(F)
    for n in range(24):
        hit = not family_restrict(F, Clopen.of({n: 1})).is_empty()
        assert (n in occ) == hit, n
    for p in F.points(20):
        assert all(n in occ for n in range(30) if p.bit(n))


def test_upset_operations():
    evens = UPSet.residue_classes(2, [0])
    threes = UPSet.residue_classes(3, [0])
    both = evens & threes
    assert both.members(20) == [0, 6, 12, 18]
    assert UPSet(3, 2, frozenset({1}), frozenset({1})).first() == 1
    assert UPSet(3, 2, frozenset(), frozenset({0})).first() == 4
    assert UPSet(0, 1, frozenset(), frozenset()).is_empty()


def test_sigma_class():
    L = Layout(("P", "Q"))
    S = sigma_class(L, ["Q"])
    assert S.contains(Point.parse("0101|0"))
    assert not S.contains(Point.parse("1|0"))
    assert sigma_class(L, []).contains(Point.parse("|0"))
    assert sigma_class(L, ["P", "Q"]) == ClosedSet.full(L)
