import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from unfolder.errors import DomainError
from unfolder.geom import (Crossing, TolerancePolicy, ambient_angle, orient2d, orient2d_many,
                           rotate2, segment_intersection)

coord = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
pt2 = st.tuples(coord, coord)
pt3 = st.tuples(coord, coord, coord)


def exact_orient(a, b, c):
    a, b, c = ([Fraction(x) for x in p] for p in (a, b, c))
    d = (a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0])
    return (d > 0) - (d < 0)


def test_orient2d_examples():
    assert orient2d((0, 0), (1, 0), (0, 1)) == 1
    assert orient2d((0, 0), (1, 0), (2, 0)) == 0
    assert orient2d((0, 0), (0, 1), (1, 0)) == -1


def test_orient2d_resolves_near_collinear_exactly():
    # the naive determinant rounds to zero here; the exact answer is positive
    a, b = (0.5, 0.5), (12.0, 12.0)
    c = (24.0, 24.0 + 2 ** -48)
    assert orient2d(a, b, c) == exact_orient(a, b, c) == 1
    c2 = (24.0, 24.0)
    assert orient2d(a, b, c2) == 0


@given(pt2, pt2, pt2)
def test_orient2d_matches_rational_oracle(a, b, c):
    assert orient2d(a, b, c) == exact_orient(a, b, c)


@given(pt2, pt2, pt2)
def test_orient2d_antisymmetric(a, b, c):
    s = orient2d(a, b, c)
    assert orient2d(b, a, c) == -s
    assert orient2d(a, c, b) == -s
    assert orient2d(c, b, a) == -s


def test_orient2d_many_agrees_with_scalar():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(200, 2)), rng.normal(size=(200, 2))
    t = rng.uniform(-2, 2, size=(200, 1))
    c = a + t * (b - a)  # nearly collinear triples stress the fallback
    got = orient2d_many(a, b, c)
    assert [orient2d(*x) for x in zip(a, b, c)] == got.tolist()


def test_segment_intersection_examples():
    assert segment_intersection(((0, 0), (1, 0)), ((0, 1), (1, 1)))[0] == Crossing.DISJOINT
    kind, p = segment_intersection(((0, 0), (1, 1)), ((0, 1), (1, 0)))
    assert kind == Crossing.CROSS and np.allclose(p, (0.5, 0.5))
    assert segment_intersection(((0, 0), (1, 0)), ((1, 0), (2, 0)))[0] == Crossing.TOUCH
    assert segment_intersection(((0, 0), (2, 0)), ((1, 0), (3, 0)))[0] == Crossing.OVERLAP
    assert segment_intersection(((0, 0), (2, 0)), ((1, 0), (1, 5)))[0] == Crossing.TOUCH


def test_segment_intersection_near_endpoint_counts_as_touch():
    tol = TolerancePolicy()
    kind, _ = segment_intersection(((0, 0), (1, 0)), ((1 + 1e-12, 1e-12), (2, 1)), tol)
    assert kind == Crossing.TOUCH


def test_segment_intersection_degenerate_raises():
    with pytest.raises(DomainError):
        segment_intersection(((0, 0), (0, 0)), ((0, 1), (1, 1)))


@given(pt2, pt2, pt2, pt2)
def test_segment_intersection_symmetric(a, b, c, d):
    if a == b or c == d:
        return
    assert segment_intersection((a, b), (c, d))[0] == segment_intersection((c, d), (a, b))[0]


def test_ambient_angle_examples():
    assert ambient_angle((1, 0, 0), (0, 1, 0)) == pytest.approx(math.pi / 2)
    assert ambient_angle((1, 0, 0), (-1, 0, 0)) == pytest.approx(math.pi)
    assert ambient_angle((1, 0, 0), (1, 0, 0)) == 0.0
    with pytest.raises(DomainError):
        ambient_angle((0, 0, 0), (1, 0, 0))


nonzero3 = pt3.filter(lambda p: np.linalg.norm(p) > 1e-3)


@given(nonzero3, nonzero3, nonzero3)
def test_ambient_angle_symmetric_and_triangle_inequality(u, v, w):
    assert ambient_angle(u, v) == ambient_angle(v, u)
    assert ambient_angle(u, w) <= ambient_angle(u, v) + ambient_angle(v, w) + 1e-9


def test_tolerance_policy_bounds(monkeypatch):
    with pytest.raises(DomainError):
        TolerancePolicy(eps_len=0.0)
    with pytest.raises(DomainError):
        TolerancePolicy(eps_ang=1e-2)
    monkeypatch.setenv("UNFOLDER_EPS", "1e-7")
    assert TolerancePolicy.from_env().eps_len == 1e-7


def test_rotate2_quarter_turn():
    assert np.allclose(rotate2((1, 0), math.pi / 2), (0, 1))
