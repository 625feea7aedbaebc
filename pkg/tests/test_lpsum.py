import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from abgeo.bodies import (CoordSubspace, as_vpolytope, box, contains, hanner_pos, make_vpolytope, negate,
                          simplex, subcube, vpolytope_sum)
from abgeo.harness.instances import random_antiblocking, random_pair
from abgeo.lpsum import (OracleBody, as_oracle, hpolytope_body, lp_combine, lp_difference_oracle, lp_sum_contains,
                         lp_sum_oracle, lp_sum_slack, rk_lp_check, rogers_shephard_lp_check, sample_oracle,
                         shift_chain, steiner_shift, sym_inclusion_check)
from abgeo.numerics import LpParam
from abgeo.volume import BBox, exact_volume, lp_diff_volume, mc_volume, polytope_oracle

from conftest import antiblocking

F = Fraction
P1, P2, PINF = LpParam.from_p(1), LpParam.from_p(2), LpParam.from_p("inf")
P_FINITE = [LpParam.from_p(p) for p in ("3/2", 2, 3)]
SQUARE = make_vpolytope([(F(-1, 4), F(-1, 2)), (F(3, 4), F(-1, 2)), (F(3, 4), F(1, 2)), (F(-1, 4), F(1, 2))])
TRIANGLE = make_vpolytope([(0, 0), (1, 0), (0, 1)])


def firey_member(A, B, p, X, ndir=20_000, margin=1e-3):
    """Support-function oracle in R^2: x in A (+)_p B iff <x,u> <= (h_A^p + h_B^p)^(1/p) for all u.

    Returns +1 (clearly inside), -1 (clearly outside) or 0 (within the margin of the boundary).
    """
    th = np.linspace(0, 2 * np.pi, ndir, endpoint=False)
    U = np.stack([np.cos(th), np.sin(th)], axis=1)
    VA = np.array([[float(c) for c in v] for v in as_vpolytope(A).vertices])
    VB = np.array([[float(c) for c in v] for v in as_vpolytope(B).vertices])
    h = ((VA @ U.T).max(axis=0) ** p.p + (VB @ U.T).max(axis=0) ** p.p) ** (1 / p.p)
    proj = X @ U.T
    safe = np.where(h > 0, h, 1.0)
    ratio = np.where(h > 0, proj / safe, np.where(proj > 0, np.inf, 0.0)).max(axis=1)
    return np.where(ratio < 1 - margin, 1, np.where(ratio > 1 + margin, -1, 0))


def test_lp_combine():
    assert lp_combine(3, 4, P1) == 7
    assert lp_combine(3, 4, PINF) == 4
    assert lp_combine(3, 4, P2) == pytest.approx(5)


def test_endpoint_membership():
    K = simplex(1, 1)
    for p in (P2, LpParam.from_p(3)):
        for v in K.orbit.vertices:
            assert lp_sum_contains(K, box(1, 1), p, v)


@pytest.mark.parametrize("p", [P2, LpParam.from_p("3/2"), LpParam.from_p(5)])
def test_self_sum_scales_by_2_to_1_over_p(p):
    K = hanner_pos(3, [0])
    c = 2 ** (1 / p.p)
    for v in K.generators:
        v = np.array([float(x) for x in v])
        assert lp_sum_contains(K, K, p, c * (1 - 1e-6) * v)
        assert not lp_sum_contains(K, K, p, c * (1 + 1e-3) * v)


def test_quarter_disk():
    e1 = subcube(CoordSubspace.spanned_by(2, [0]))
    e2 = subcube(CoordSubspace.spanned_by(2, [1]))
    u = np.array([math.cos(math.pi / 4), math.sin(math.pi / 4)])
    assert lp_sum_contains(e1, e2, P2, u * (1 - 1e-3))
    assert not lp_sum_contains(e1, e2, P2, u * (1 + 1e-3))


@pytest.mark.parametrize("p", P_FINITE)
def test_lp_sum_against_support_function_oracle(p, rng):
    for A, B in ((SQUARE, TRIANGLE), (simplex(1, 2), box(F(1, 2), 1)), (TRIANGLE, negate(box(1, 1)))):
        K = lp_sum_oracle(A, B, p)
        lo = np.array([float(v) for v in K.bbox.lower])
        hi = np.array([float(v) for v in K.bbox.upper])
        X = lo + (hi - lo) * rng.random((400, 2))
        want = firey_member(A, B, p, X)
        got = K.member(X)
        decided = want != 0
        assert np.array_equal(got[decided], want[decided] > 0)


def test_feasible_t_set_is_an_interval(rng):
    A, B = SQUARE, TRIANGLE
    S = vpolytope_sum(A, B)
    hs = S.hull.halfspaces()
    normals = np.array([[float(v) for v in a] for a, _ in hs])
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    VA = np.array([[float(c) for c in v] for v in A.vertices])
    VB = np.array([[float(c) for c in v] for v in B.vertices])
    hA, hB = (VA @ normals.T).max(axis=0), (VB @ normals.T).max(axis=0)
    X = -1.5 + 3 * rng.random((1000, 2))
    ts = np.linspace(0, 1, 257)
    for p in P_FINITE:
        ok = lp_sum_slack(X, normals, hA, hB, p, ts=ts) <= 0
        for row in ok:
            idx = np.nonzero(row)[0]
            if len(idx):
                assert idx[-1] - idx[0] + 1 == len(idx)


def test_nested_decreasing_in_p(rng):
    # (h_A^p + h_B^p)^(1/p) decreases in p, so the sums shrink from A + B down to conv(A u B)
    for seed in range(5):
        A, B = random_pair(2, seed, tag="mono")
        X = 2.2 * rng.random((200, 2))
        prev = None
        for p in (P1, LpParam.from_p("3/2"), P2, LpParam.from_p(4), PINF):
            cur = lp_sum_oracle(A, B, p).member(X)
            if prev is not None:
                assert not (cur & ~prev).any()
            prev = cur


def test_lp_difference_oracle_matches_t_search(rng):
    for seed in range(3):
        A, B = random_pair(2, seed, tag="diff-oracle")
        for p in P_FINITE:
            gauge = lp_difference_oracle(A, [B], p)
            search = lp_sum_oracle(A, negate(B), p)
            X = -1 + 2 * rng.random((500, 2))
            want = firey_member(A, negate(B), p, X, margin=1e-4)
            d = want != 0
            assert np.array_equal(gauge.member(X)[d], want[d] > 0)
            assert np.array_equal(search.member(X)[d], want[d] > 0)


def test_lp_difference_oracle_endpoints(rng):
    A, B1, B2 = (random_antiblocking(3, 3, s, tag="endpoints") for s in range(3))
    X = -2 + 3 * rng.random((2000, 3))
    minkowski = polytope_oracle(vpolytope_sum(vpolytope_sum(A.orbit, negate(B1)), negate(B2)))
    union = polytope_oracle(make_vpolytope(list(A.orbit.vertices) + list(negate(B1).vertices)
                                           + list(negate(B2).vertices)))
    for p, ref in ((P1, minkowski), (PINF, union)):
        got = lp_difference_oracle(A, [B1, B2], p, tol=0).member(X)
        assert (got == ref(X)).mean() > 0.999


def test_lp_difference_volume_of_simplex_matches_formula():
    K = simplex(1, 1)
    O = lp_difference_oracle(K, [K], P2)
    est = mc_volume(O.member, O.bbox, 200_000, 5)
    assert abs(est.value - (2 + math.pi) / 2) <= 3 * est.stderr


# Steiner shift --------------------------------------------------------------

def test_shift_fixes_antiblocking():
    K = hanner_pos(3, [0])
    O = as_oracle(K)
    assert steiner_shift(O, 1) is O


def test_shift_preserves_volume():
    for i in (0, 1):
        S = steiner_shift(SQUARE, i)
        est = mc_volume(S.member, S.bbox, 200_000, 2)
        assert abs(est.value - 1.0) <= 3 * est.stderr + 1e-6
    P = make_vpolytope([(F(-1, 2), F(-1, 3)), (F(2, 3), 0), (0, F(3, 4)), (F(1, 5), F(-1, 2))])
    S = steiner_shift(P, 0)
    direct = mc_volume(polytope_oracle(P), BBox.of(P), 200_000, 7)
    shifted = mc_volume(S.member, S.bbox, 200_000, 8)
    assert abs(direct.value - shifted.value) <= 3 * math.hypot(direct.stderr, shifted.stderr)


def dyadic_points(rng, n, count, lo=-1, hi=1, bits=10):
    raw = rng.integers(lo * 2 ** bits, hi * 2 ** bits + 1, size=(count, n))
    return [tuple(F(int(v), 2 ** bits) for v in row) for row in raw]


def test_shift_chain_recovers_antiblocking_body(rng):
    for seed in range(3):
        B = random_antiblocking(3, 3, seed, tag="chain")
        S = shift_chain(negate(B), [0, 1, 2])
        for x in dyadic_points(rng, 3, 1000):
            assert S.exact_contains(x) == contains(B, x)


def test_shift_idempotent(rng):
    P = make_vpolytope([(F(-1, 2), F(-1, 3), 0), (F(2, 3), 0, F(1, 3)), (0, F(3, 4), F(-1, 4)),
                        (F(1, 5), F(-1, 2), F(1, 2))])
    once = steiner_shift(P, 1)
    twice = steiner_shift(once, 1)
    for x in dyadic_points(rng, 3, 1000):
        assert once.exact_contains(x) == twice.exact_contains(x)


def test_generic_oracle_shift_of_disk(rng):
    c, r = np.array([0.3, 0.2]), 0.5

    def disk(X):
        return ((np.asarray(X) - c) ** 2).sum(axis=1) <= r * r

    D = OracleBody(2, disk, BBox((c[0] - r, c[1] - r), (c[0] + r, c[1] + r)))
    S = steiner_shift(D, 0)
    X = np.column_stack([rng.random(2000), c[1] - r + 2 * r * rng.random(2000)])
    half = np.sqrt(np.maximum(r * r - (X[:, 1] - c[1]) ** 2, 0))
    want = X[:, 0] <= 2 * half
    clear = np.abs(X[:, 0] - 2 * half) > 1e-3
    assert np.array_equal(S.member(X)[clear], want[clear])
    again = steiner_shift(S, 0)
    assert (again.member(X[clear]) == S.member(X[clear])).mean() > 0.995


def test_sample_oracle_stays_inside(rng):
    O = as_oracle(SQUARE)
    pts = sample_oracle(O, 500, rng)
    assert pts.shape == (500, 2) and O.member(pts).all()


def test_hpolytope_body_bbox():
    hs = SQUARE.hull.halfspaces()
    H = hpolytope_body(hs, 2)
    assert H.bbox.lower[0] == pytest.approx(-0.25) and H.bbox.upper[1] == pytest.approx(0.5)


# checks ---------------------------------------------------------------------

def test_sym_inclusion():
    A, B = random_pair(2, 3, tag="sym")
    assert sym_inclusion_check(A, B, P2, 300, 1).lhs == 0
    rep = sym_inclusion_check(SQUARE, TRIANGLE, P2, 1000, 2)
    assert rep.passed and rep.details["violations"] == 0
    assert sym_inclusion_check(SQUARE, TRIANGLE, P1, 1000, 3).passed


def test_rk_lp_box_and_simplex():
    for K, self_sum in ((box(1, 1), 2.0), (simplex(1, 1), 1.0)):
        rep = rk_lp_check(K, K, P2, 100_000, 4)
        assert rep.passed
        # K (+)_2 K = sqrt(2) K, so its area is 2 |K|
        assert abs(rep.lhs - self_sum) <= 3 * rep.lhs_stderr + 1e-9
    rep = rk_lp_check(simplex(1, 1), simplex(1, 1), P2, 20_000, 1)
    assert rep.rhs == pytest.approx((2 + math.pi) / 2)


def test_rk_lp_endpoints_exact():
    A, B = random_pair(3, 2)
    for p in (P1, PINF):
        rep = rk_lp_check(A, B, p)
        assert rep.method == "exact" and rep.passed and rep.stderr == 0


@pytest.mark.parametrize("p", [P1, LpParam.from_p("3/2"), P2, PINF])
def test_rogers_shephard_simplex_equality(p):
    for n in (1, 2, 3):
        rep = rogers_shephard_lp_check(simplex(*[1] * n), p)
        assert rep.passed and rep.details["equality"] and rep.details["is_simplex"]


def test_rogers_shephard_box_strict():
    rep = rogers_shephard_lp_check(box(1, 2), P2)
    assert rep.passed and rep.margin > 0
    assert rep.lhs == pytest.approx(2 * (2 + math.pi / 2))


@given(antiblocking())
def test_rogers_shephard_endpoints_exact(K):
    import math
    vol = exact_volume(K)
    n = K.dim
    # p = 1 pairs with q = infinity (the classical binom(2n, n)); p = infinity with q = 1 (2^n)
    for p, const in ((P1, math.comb(2 * n, n)), (PINF, 2 ** n)):
        rep = rogers_shephard_lp_check(K, p)
        assert rep.method == "exact" and rep.passed
        assert rep.rhs == const * vol


@given(antiblocking(), st.sampled_from(["1", "3/2", "2", "4", "inf"]))
def test_lp_difference_lower_bound(K, p):
    lp = LpParam.from_p(p)
    vol = float(exact_volume(K))
    assert float(lp_diff_volume(K, K, lp)) >= 2 ** (K.dim * float(lp.p_inv)) * vol - 1e-9
