from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from abgeo.hull import bareiss_det, brute_volume, convex_hull, rank_and_pivots
from abgeo.lp import convex_combination_feasible, dominated_certified, linprog_exact

small_int = st.integers(-6, 6)


@given(st.integers(1, 5).flatmap(lambda k: st.lists(st.lists(small_int, min_size=k, max_size=k),
                                                     min_size=k, max_size=k)))
def test_bareiss_matches_numpy(M):
    assert bareiss_det(M) == round(np.linalg.det(np.array(M, dtype=float)))


def test_rank():
    assert rank_and_pivots([[1, 2], [2, 4]])[0] == 1
    assert rank_and_pivots([[1, 0, 0], [0, 1, 0], [1, 1, 0]])[0] == 2


def test_linprog_exact_simple():
    res = linprog_exact([1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    assert res.status == "optimal"
    assert res.value == Fraction(14, 5)
    assert linprog_exact([1], A_eq=[[1]], b_eq=[-1]).status == "infeasible"
    assert linprog_exact([1, 0], A_ub=[[-1, 1]], b_ub=[1]).status == "unbounded"


@given(st.lists(st.lists(st.integers(-4, 6), min_size=3, max_size=3), min_size=1, max_size=4),
       st.lists(st.integers(1, 9), min_size=4, max_size=4), st.lists(st.integers(-3, 5), min_size=3, max_size=3))
def test_linprog_exact_against_highs(A, b, c):
    b = b[:len(A)]
    A = A + [[1, 1, 1]]
    b = b + [10]  # bounded feasible region containing the origin
    ours = linprog_exact(c, A_ub=A, b_ub=b)
    ref = linprog(-np.array(c, dtype=float), A_ub=A, b_ub=b, method="highs")
    assert ours.status == "optimal"
    assert float(ours.value) == pytest.approx(-ref.fun, abs=1e-7)


def test_convex_combination_feasible():
    pts = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
    assert convex_combination_feasible(pts, (Fraction(1, 2), Fraction(1, 2)))
    assert not convex_combination_feasible(pts, (Fraction(1, 4), Fraction(1, 4)))
    assert convex_combination_feasible(pts, (Fraction(1, 4), Fraction(1, 4)), dominate=True)


def shoelace(pts):
    cx = sum(float(p[0]) for p in pts) / len(pts)
    cy = sum(float(p[1]) for p in pts) / len(pts)
    order = sorted(pts, key=lambda p: np.arctan2(float(p[1]) - cy, float(p[0]) - cx))
    s = 0
    for (x1, y1), (x2, y2) in zip(order, order[1:] + order[:1]):
        s += x1 * y2 - x2 * y1
    return abs(s) / 2


@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=3, max_size=12, unique=True))
def test_hull_area_against_shoelace(pts):
    if np.linalg.matrix_rank(np.array(pts) - pts[0]) < 2:
        return
    h = convex_hull(pts)
    verts = [tuple(map(Fraction, p)) for p in h.vertex_points]
    assert h.volume == Fraction(shoelace(verts))
    assert set(map(tuple, np.array(pts)[ConvexHull(pts).vertices].tolist())) == \
        {tuple(int(v) for v in p) for p in verts}


@given(st.lists(st.tuples(*[st.integers(0, 6)] * 3), min_size=4, max_size=14, unique=True))
def test_hull_volume_against_scipy_and_brute(pts):
    if np.linalg.matrix_rank(np.array(pts) - pts[0]) < 3:
        return
    h = convex_hull(pts)
    assert float(h.volume) == pytest.approx(ConvexHull(pts).volume, rel=1e-9)
    assert h.volume == brute_volume(pts)


def test_lower_dimensional_hull_measures_affine_volume():
    h = convex_hull([(0, 0, 0), (2, 0, 0), (0, 3, 0)])
    assert h.affine_dim == 2 and not h.full_dimensional
    assert h.volume == 3
    assert h.is_coordinate_parallel()


def test_halfspaces_contain_points():
    h = convex_hull([(0, 0), (2, 0), (0, 2), (1, 1), (Fraction(1, 2), Fraction(1, 2))])
    for p in h.points:
        assert all(sum(a * x for a, x in zip(row, p)) <= b for row, b in h.halfspaces())
    assert len(h.vertices) == 3


nonneg = st.integers(0, 4).map(lambda v: Fraction(v, 2))


@given(st.integers(1, 4).flatmap(lambda d: st.tuples(
    st.lists(st.lists(nonneg, min_size=d, max_size=d), min_size=1, max_size=6),
    st.lists(nonneg, min_size=d, max_size=d))))
def test_certified_domination_matches_exact_lp(data):
    # small half-integer grids put many targets exactly on faces, where rounding matters most
    points, target = data
    assert dominated_certified(points, target) == convex_combination_feasible(points, target, dominate=True)


def test_certified_domination_edge_cases():
    F = Fraction
    assert not dominated_certified([], [F(0)])
    assert dominated_certified([[F(1), F(0)], [F(0), F(1)]], [F(1, 2), F(1, 2)])
    assert not dominated_certified([[F(1), F(0)], [F(0), F(1)]], [F(1, 2), F(1, 2) + F(1, 10 ** 12)])
