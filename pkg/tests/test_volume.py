import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial import ConvexHull

from abgeo.bodies import (BodyError, CoordSubspace, box, difference_polytope, hanner_pos, make_vpolytope,
                          minkowski_sum, negate, origin, simplex, subcube)
from abgeo.harness.instances import random_antiblocking, random_pair
from abgeo.lpsum import lp_difference_oracle
from abgeo.numerics import LpParam
from abgeo.volume import (BBox, VolumeEstimate, VolumeResourceError, diff_volume_decomp, direct_lp_sum_volume,
                          exact_volume, lp_diff_volume, mc_volume, polytope_oracle, projection_volume,
                          volint_identity_check)

from conftest import antiblocking, antiblocking_pair

F = Fraction
P1, P2, PINF = LpParam.from_p(1), LpParam.from_p(2), LpParam.from_p("inf")


def qhull_volume(P):
    pts = np.array([[float(x) for x in v] for v in P.vertices])
    if pts.shape[1] == 1:
        return float(pts.max() - pts.min())
    return ConvexHull(pts).volume


def test_exact_volume_examples():
    assert exact_volume(simplex(1, 1, 1)) == F(1, 6)
    assert exact_volume(hanner_pos(4, [0, 1])) == F(1, 6)
    D = difference_polytope(simplex(1, 1), simplex(1, 1))
    assert exact_volume(D) == 3  # hexagon with vertices +-e1, +-e2, +-(e1-e2)
    assert float(exact_volume(D)) == pytest.approx(qhull_volume(D))


def test_lower_dimensional_volume():
    U = subcube(CoordSubspace.spanned_by(3, [0, 2]), 2)
    assert exact_volume(U) == 0
    assert exact_volume(U, affine=True) == 4


@given(antiblocking(max_n=4))
def test_exact_volume_against_qhull(K):
    V = K.orbit
    if not V.full_dimensional:
        assert exact_volume(K) == 0
        return
    assert float(exact_volume(K)) == pytest.approx(qhull_volume(V), rel=1e-9)


@given(antiblocking(max_n=4), st.fractions(min_value=F(1, 8), max_value=4))
def test_scaling(K, t):
    assert exact_volume(K.scale(t)) == t ** K.dim * exact_volume(K)


def test_resource_limit():
    with pytest.raises(VolumeResourceError):
        exact_volume(box(*[1] * 7))


def test_decomposition_examples():
    tri = simplex(1, 1)
    assert diff_volume_decomp(tri, tri) == 3
    assert diff_volume_decomp(tri, box(1, 1)) == F(7, 2)
    assert diff_volume_decomp(hanner_pos(3, [1]), origin(3)) == exact_volume(hanner_pos(3, [1]))
    with pytest.raises(BodyError):
        diff_volume_decomp(tri, box(1, 1, 1))


@given(antiblocking_pair())
def test_decomposition_identity_and_reverse_kleitman(pair):
    A, B = pair
    d = diff_volume_decomp(A, B)
    assert d == exact_volume(difference_polytope(A, B))
    assert exact_volume(minkowski_sum(A, B)) <= d


def test_projection_volume_of_zero_space():
    assert projection_volume(box(2, 3), CoordSubspace.spanned_by(2, [])) == 1
    assert projection_volume(box(2, 3), CoordSubspace.spanned_by(2, [1])) == 3


def test_lp_diff_volume_examples():
    A, B = random_pair(3, 7)
    assert lp_diff_volume(A, B, P1) == diff_volume_decomp(A, B)
    tri = simplex(1, 1)
    assert lp_diff_volume(tri, tri, P2) == pytest.approx((2 + math.pi) / 2, rel=1e-12)
    assert lp_diff_volume(box(1, 1), box(1, 1), PINF) == 3


def test_lp_diff_volume_inf_against_mc_hull():
    A = B = box(1, 1)
    hull = make_vpolytope(list(A.orbit.vertices) + list(negate(B).vertices))
    est = mc_volume(polytope_oracle(hull), BBox.of(hull), 100_000, 3)
    assert abs(est.value - float(lp_diff_volume(A, B, PINF))) <= 3 * est.stderr


def test_lp_diff_volume_p2_against_mc_oracle():
    A, B = random_pair(2, 11)
    K = lp_difference_oracle(A, [B], P2)
    est = mc_volume(K.member, K.bbox, 100_000, 4)
    assert abs(est.value - lp_diff_volume(A, B, P2)) <= 3 * est.stderr + 1e-9


def test_direct_lp_sum_volume_examples():
    seg1 = subcube(CoordSubspace.spanned_by(2, [0]))
    seg2 = subcube(CoordSubspace.spanned_by(2, [1]))
    assert direct_lp_sum_volume(seg1, seg2, P1) == 1
    assert direct_lp_sum_volume(seg1, seg2, PINF) == F(1, 2)
    assert direct_lp_sum_volume(seg1, seg2, P2) == pytest.approx(math.pi / 4, rel=1e-12)
    with pytest.raises(BodyError):
        direct_lp_sum_volume(seg1, seg1, P2, CoordSubspace.spanned_by(2, [0]))


def test_mc_volume_examples():
    est = mc_volume(polytope_oracle(box(1, 1)), BBox.orthant((1, 1)), 10_000, 0)
    assert est.value == 1 and est.stderr == 0
    for K in (simplex(1, 1, 1), hanner_pos(4, [0, 1])):
        est = mc_volume(polytope_oracle(K), BBox.orthant([1] * K.dim), 1_000_000, 1)
        assert abs(est.value - float(exact_volume(K))) <= 3 * est.stderr


def test_mc_volume_within_3_sigma_on_random_bodies():
    misses = 0
    for s in range(50):
        n = 1 + s % 4
        K = random_antiblocking(n, 1 + s % 5, s, tag="mc-suite")
        est = mc_volume(polytope_oracle(K), BBox.of(K), 100_000, s)
        misses += abs(est.value - float(exact_volume(K))) > 3 * est.stderr
    assert misses <= 1  # 3 sigma leaves about 0.3% per instance


def test_mc_volume_deterministic_across_jobs():
    K = random_antiblocking(3, 4, 5)
    runs = [mc_volume(polytope_oracle(K), BBox.of(K), 50_000, 9, jobs=j) for j in (1, 3)]
    assert runs[0] == runs[1]
    assert mc_volume(polytope_oracle(K), BBox.of(K), 50_000, 10) != runs[0]


def test_volume_estimate_invariants():
    with pytest.raises(ValueError):
        VolumeEstimate(1.0, 0.1, 10, "exact")
    d = VolumeEstimate(F(1, 2), 0.0, 0, "exact").to_dict()
    assert d["value"] == "1/2"


@pytest.mark.parametrize("K,q", [(box(1, 1), 1), (simplex(1, 1, 1), 2), (box(2, 3), 3)])
def test_volint_identity(K, q):
    rep = volint_identity_check(K, q, 100_000, 2)
    assert rep.passed, rep.to_dict()
    assert rep.rhs == exact_volume(K)


def test_low_dimensional_degenerate_bodies():
    from abgeo.bodies import make_antiblocking, origin
    assert exact_volume(make_antiblocking(2, [(1, 0)])) == 0
    assert exact_volume(origin(2)) == 0
    assert exact_volume(make_antiblocking(1, [(Fraction(3, 4),)])) == Fraction(3, 4)
    # staircase: unit square with the corner cut at (1, 1/2), (1/2, 1)
    assert exact_volume(make_antiblocking(2, [(1, Fraction(1, 2)), (Fraction(1, 2), 1)])) == Fraction(7, 8)
