import pytest
from hypothesis import given, settings, strategies as st

from _gen import random_family, random_point, rng
from stonespace.closure import closure
from stonespace.core import Layout, Point, StoneSpaceError
from stonespace.family import single_track
from stonespace.oracle import OracleConfig, bounded_points, depth_bound, oracle_accumulation, oracle_closure_member

RUNS = single_track("1*", "0")


def test_examples():
    assert oracle_closure_member(RUNS, Point.parse("|1"))
    assert not oracle_closure_member(RUNS, Point.parse("01|0"))
    assert oracle_closure_member(RUNS, Point.parse("111|0"))
    assert not oracle_accumulation(RUNS, Point.parse("111|0"))


def test_bounds_are_enforced():
    with pytest.raises(StoneSpaceError):
        oracle_closure_member(RUNS, Point.parse("0000000001|0"))
    with pytest.raises(StoneSpaceError):
        oracle_closure_member(RUNS, Point.parse("|0001"))
    with pytest.raises(StoneSpaceError):
        OracleConfig(max_cycle=0)
    assert oracle_closure_member(RUNS, Point.parse("0000000001|0"), OracleConfig(max_stem=12)) is False


def test_depth_bound_grows_with_the_point():
    assert depth_bound(RUNS, Point.parse("0101|01")) > depth_bound(RUNS, Point.parse("|0"))


def test_bounded_points_are_distinct():
    pts = list(bounded_points(3, 2))
    assert len(pts) == len(set(pts))
    assert Point.parse("|1") in pts and Point.parse("0110|1") not in pts


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_oracle_agrees_with_engine(seed):
    r = rng(f"oracle{seed}")
    F = random_family(r, Layout(("A", "B")) if r.random() < 0.3 else None)
    C = closure(F)
    for _ in range(10):
        p = random_point(r)
        assert oracle_closure_member(F, p) == C.contains(p), (F, p)
