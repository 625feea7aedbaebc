"""Firey L_p sums as membership oracles, Steiner-type shifts, and their checks.

For bodies containing the origin, ``x`` lies in the L_p sum of ``A`` and ``B``
iff ``min_t g(t) <= 0`` with

    g(t) = max_a ( <a, x> - s(t) h_A(a) - u(t) h_B(a) ),
    s(t) = (1-t)^(1/q),  u(t) = t^(1/q),

the maximum running over the facet normals of ``A + B`` (which also describe
every ``sA + uB``).  ``g`` is convex in ``t`` because ``s`` and ``u`` are
concave and the support values are nonnegative, so the minimum is found by a
coarse grid followed by golden-section refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from .bodies import (AntiBlockingBody, Body, CoordSubspace, VPolytope, as_vpolytope, contains, make_vpolytope,
                     minkowski_sum, project, vpolytope_sum)
from .numerics import LpKind, LpParam
from .report import CheckReport
from .volume import (BBox, VolumeEstimate, diff_volume_decomp, exact_volume, lp_diff_volume, mc_volume,
                     polytope_oracle)

T_GRID = 64
GOLDEN_STEPS = 40
BAND = 1e-9
_INVPHI = (math.sqrt(5) - 1) / 2

Oracle = Callable[[np.ndarray], np.ndarray]


@dataclass
class OracleBody:
    """A body known through a vectorized float membership test and a bounding box.

    ``exact_contains`` (rational points) and ``halfspaces`` are present when
    the body has an exact H-representation.
    """

    dim: int
    member: Oracle
    bbox: BBox
    antiblocking: bool = False
    tol: float = BAND
    halfspaces: list | None = None
    exact_contains: Callable[[Sequence[Fraction]], bool] | None = None
    source: Body | None = None

    def contains(self, x) -> bool:
        if self.exact_contains is not None:
            return self.exact_contains([Fraction(v) for v in x])
        return bool(self.member(np.asarray([x], dtype=float))[0])


def as_oracle(K) -> OracleBody:
    if isinstance(K, OracleBody):
        return K
    if isinstance(K, (AntiBlockingBody, VPolytope)):
        return OracleBody(K.dim, polytope_oracle(K), BBox.of(K), isinstance(K, AntiBlockingBody),
                          halfspaces=as_vpolytope(K).hull.halfspaces(), exact_contains=lambda x: contains(K, x),
                          source=K)
    raise TypeError(f"cannot build a membership oracle from {type(K).__name__}")


def lp_combine(a: float, b: float, p: LpParam) -> float:
    """``(a^p + b^p)^(1/p)`` for ``a, b >= 0``, with the endpoint limits."""
    if p.kind is LpKind.ONE:
        return a + b
    if p.kind is LpKind.INF:
        return max(a, b)
    pv = p.p
    return (a ** pv + b ** pv) ** (1 / pv)


def _st(ts: np.ndarray, p: LpParam):
    qi = float(p.q_inv)
    return np.power(1.0 - ts, qi), np.power(ts, qi)


def _convex_lower_bound(vals: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Lower bound for a convex function on ``[t_{k-1}, t_{k+1}]`` from its grid values.

    A secant extended beyond its chord undercuts a convex function, so each
    half-interval is bounded by the neighbouring secants.
    """
    npts, T = vals.shape
    pad = np.full((npts, 2), np.nan)
    V = np.concatenate([pad, vals, pad], axis=1)
    r = np.arange(npts)
    f = lambda off: V[r, k + 2 + off]  # noqa: E731
    with np.errstate(invalid="ignore"):
        left = np.fmax(2 * f(0) - f(1), 2 * f(-1) - f(-2))
        right = np.fmax(2 * f(0) - f(-1), 2 * f(1) - f(2))
    left = np.where(np.isnan(left), -np.inf, left)
    right = np.where(np.isnan(right), -np.inf, right)
    left = np.where(k == 0, np.inf, left)
    right = np.where(k == T - 1, np.inf, right)
    return np.minimum(left, right)


def _min_over_t(value_at: Callable[[np.ndarray, np.ndarray], np.ndarray], npts: int,
                threshold: float | None = None) -> np.ndarray:
    """Minimize ``value_at(t, rows)`` over ``t`` in [0, 1], one ``t`` per point.

    With ``threshold`` the function is taken to be convex: points whose grid
    lower bound already exceeds the threshold skip the golden-section stage,
    and refinement stops mattering once a point is below it.
    """
    grid = np.linspace(0.0, 1.0, T_GRID)
    every = np.arange(npts)
    vals = np.stack([value_at(np.full(npts, t), every) for t in grid], axis=1)
    k = np.argmin(vals, axis=1)
    best = vals[np.arange(npts), k]
    if threshold is None:
        todo = np.arange(npts)
    else:
        todo = np.nonzero((best > threshold) & (_convex_lower_bound(vals, k) <= threshold))[0]
    if len(todo) == 0:
        return best

    def sub(t):
        return value_at(t, todo)

    lo = grid[np.maximum(k[todo] - 1, 0)]
    hi = grid[np.minimum(k[todo] + 1, T_GRID - 1)]
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = sub(c), sub(d)
    for _ in range(GOLDEN_STEPS):
        left = fc < fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        c = hi - _INVPHI * (hi - lo)
        d = lo + _INVPHI * (hi - lo)
        fc, fd = sub(c), sub(d)
    best[todo] = np.minimum(best[todo], np.minimum(fc, fd))
    return best


def _supports(P: VPolytope, normals: np.ndarray) -> np.ndarray:
    V = np.array([[float(v) for v in vert] for vert in P.vertices])
    return (V @ normals.T).max(axis=0)


def lp_sum_oracle(A: Body | OracleBody, B: Body | OracleBody, p: LpParam, tol: float = BAND) -> OracleBody:
    """Membership oracle for the L_p sum of two polytopes containing the origin.

    The endpoints are exact polytopes (Minkowski sum at p = 1, convex hull of
    the union at p = infinity); finite p uses the convex t-search.
    """
    A = A.source if isinstance(A, OracleBody) else A
    B = B.source if isinstance(B, OracleBody) else B
    PA, PB = as_vpolytope(A), as_vpolytope(B)
    both_ab = isinstance(A, AntiBlockingBody) and isinstance(B, AntiBlockingBody)
    if p.kind is LpKind.ONE:
        out = as_oracle(vpolytope_sum(PA, PB))
        out.antiblocking = both_ab
        return out
    if p.kind is LpKind.INF:
        out = as_oracle(make_vpolytope(list(PA.vertices) + list(PB.vertices)))
        out.antiblocking = both_ab
        return out
    S = vpolytope_sum(PA, PB)
    if not S.full_dimensional:
        raise ValueError("L_p sum oracle needs a full-dimensional Minkowski sum")
    hs = S.hull.halfspaces()
    normals = np.array([[float(v) for v in a] for a, _ in hs])
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    hA, hB = _supports(PA, normals), _supports(PB, normals)
    if (hA < -1e-12).any() or (hB < -1e-12).any():
        raise ValueError("L_p sum oracle needs both bodies to contain the origin")
    scale = max(1.0, float(np.max(hA + hB)))

    def member(X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty(len(X), dtype=bool)
        for start in range(0, len(X), 4096):
            Xc = X[start:start + 4096]
            out[start:start + 4096] = lp_sum_slack(Xc, normals, hA, hB, p, threshold=tol * scale) <= tol * scale
        return out

    lo = [-lp_combine(max(float(-a), 0.0), max(float(-b), 0.0), p) for a, b in zip(BBox.of(PA).lower, BBox.of(PB).lower)]
    hi = [lp_combine(max(float(a), 0.0), max(float(b), 0.0), p) for a, b in zip(BBox.of(PA).upper, BBox.of(PB).upper)]
    return OracleBody(S.dim, member, BBox(tuple(lo), tuple(hi)), both_ab, tol)


def lp_sum_slack(X: np.ndarray, normals: np.ndarray, hA: np.ndarray, hB: np.ndarray, p: LpParam,
                 ts: np.ndarray | None = None, threshold: float | None = None) -> np.ndarray:
    """``min_t g(t)`` per point, or ``g`` on the given grid ``ts`` (shape ``(N, len(ts))``)."""
    proj = X @ normals.T

    def g(t, rows):
        s, u = _st(t, p)
        return (proj[rows] - s[:, None] * hA - u[:, None] * hB).max(axis=1)

    if ts is not None:
        every = np.arange(len(X))
        return np.stack([g(np.full(len(X), t), every) for t in ts], axis=1)
    return _min_over_t(g, len(X), threshold)


def lp_sum_contains(A: Body, B: Body, p: LpParam, x: Sequence, tol: float = BAND) -> bool:
    """Is ``x`` in the L_p sum of ``A`` and ``B``?  One-sided band ``tol`` (relative)."""
    return bool(lp_sum_oracle(A, B, p, tol).member(np.asarray([x], dtype=float))[0])


# L_p differences of anti-blocking bodies --------------------------------

def _ab_gauge_data(K: AntiBlockingBody):
    hs = K.orbit.hull.halfspaces()
    rows = [(a, b) for a, b in hs if b > 0]
    return np.array([[float(v) for v in a] for a, _ in rows]), np.array([float(b) for _, b in rows])


def _polytope_gauge(data, Y: np.ndarray) -> np.ndarray:
    """Gauge of nonnegative points in a full-dimensional anti-blocking polytope."""
    A, b = data
    return np.maximum((Y @ A.T / b).max(axis=1), 0.0)


def _lp_pair_gauge(B: AntiBlockingBody, C: AntiBlockingBody, p: LpParam):
    """Gauge of the L_p sum of two anti-blocking polytopes, via ``min_t`` of a quasi-convex ratio."""
    S = vpolytope_sum(B.orbit, C.orbit)
    hs = [(a, b) for a, b in S.hull.halfspaces() if b > 0]
    normals = np.array([[float(v) for v in a] for a, _ in hs])
    hB, hC = _supports(B.orbit, normals), _supports(C.orbit, normals)

    def gauge(Y: np.ndarray) -> np.ndarray:
        proj = Y @ normals.T

        def lam(t, rows):
            s, u = _st(t, p)
            den = s[:, None] * hB + u[:, None] * hC
            pr = proj[rows]
            with np.errstate(divide="ignore", invalid="ignore"):
                r = np.where(den > 0, pr / den, np.where(pr > 0, np.inf, 0.0))
            return r.max(axis=1)

        return np.maximum(_min_over_t(lam, len(Y)), 0.0)

    return gauge


def _combine_gauges(g1: np.ndarray, g2: np.ndarray, p: LpParam) -> np.ndarray:
    if p.kind is LpKind.ONE:
        return np.maximum(g1, g2)
    if p.kind is LpKind.INF:
        return g1 + g2
    q = p.q
    return (g1 ** q + g2 ** q) ** (1 / q)


def lp_difference_oracle(A: AntiBlockingBody, Bs: Sequence[AntiBlockingBody], p: LpParam,
                         tol: float = BAND) -> OracleBody:
    """Oracle for ``A (+)_p -B_1 (+)_p ... (+)_p -B_m`` with ``m`` in {1, 2}.

    Points are split by sign pattern: on the orthant where the coordinates
    ``E`` are nonnegative and the rest nonpositive, the set is the direct L_p
    sum of ``P_E A`` and ``-P_{E^perp} D`` with ``D`` the L_p sum of the
    ``B_i``, so membership reduces to the two gauges.
    """
    if not 1 <= len(Bs) <= 2:
        raise ValueError("supported for one or two subtracted bodies")
    n = A.dim
    cache: dict[int, tuple] = {}

    def pieces(mask: int):
        if mask not in cache:
            E = CoordSubspace(n, mask)
            Ec = E.complement()
            gA = _ab_gauge_data(project(A, E)) if E.size else None
            if Ec.size == 0:
                gD = None
            elif len(Bs) == 1:
                data = _ab_gauge_data(project(Bs[0], Ec))
                gD = lambda Y, data=data: _polytope_gauge(data, Y)  # noqa: E731
            else:
                gD = _lp_pair_gauge(project(Bs[0], Ec), project(Bs[1], Ec), p)
            cache[mask] = (E, Ec, gA, gD)
        return cache[mask]

    def member(X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        masks = ((X >= 0) * (1 << np.arange(n))).sum(axis=1)
        out = np.zeros(len(X), dtype=bool)
        for mask in np.unique(masks):
            rows = np.nonzero(masks == mask)[0]
            E, Ec, gA, gD = pieces(int(mask))
            Y = X[rows]
            ga = _polytope_gauge(gA, Y[:, list(E.idx)]) if gA is not None else np.zeros(len(rows))
            gd = gD(-Y[:, list(Ec.idx)]) if gD is not None else np.zeros(len(rows))
            out[rows] = _combine_gauges(ga, gd, p) <= 1.0 + tol
        return out

    up = A.upper_corner()
    ext = [0.0] * n
    for B in Bs:
        c = B.upper_corner()
        ext = [lp_combine(e, float(v), p) for e, v in zip(ext, c)]
    return OracleBody(n, member, BBox(tuple(-e for e in ext), tuple(float(u) for u in up)), False, tol)


# Steiner-type shift -----------------------------------------------------

def _primitive(a: Sequence[Fraction], b: Fraction):
    den = 1
    for v in list(a) + [b]:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in a] + [int(b * den)]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    g = g or 1
    return tuple(Fraction(v // g) for v in ints[:-1]), Fraction(ints[-1] // g)


def _prune_halfspaces(hs):
    """Drop inequalities that are redundant by a clear float margin (kept otherwise)."""
    hs = sorted(set(hs))
    if len(hs) <= 2 * len(hs[0][0]) + 2:
        return hs
    A, b = _float_rows(hs)
    keep = []
    n = A.shape[1]
    for k in range(len(hs)):
        mask = np.ones(len(hs), dtype=bool)
        mask[k] = False
        for j in range(k):
            if j not in keep:
                mask[j] = False
        res = linprog(-A[k], A_ub=A[mask], b_ub=b[mask] + 1e-9, bounds=[(None, None)] * n, method="highs")
        if res.status == 0 and -res.fun <= b[k] - 1e-7 * (1 + abs(b[k])):
            continue
        keep.append(k)
    return [hs[k] for k in keep]


def _float_rows(hs):
    """Float rows scaled to unit max-norm (primitive integer rows can be huge)."""
    A = np.array([[float(v) for v in a] for a, _ in hs])
    b = np.array([float(v) for _, v in hs])
    s = np.abs(A).max(axis=1)
    s[s == 0] = 1.0
    return A / s[:, None], b / s


def _hbbox(hs, dim) -> BBox:
    A, b = _float_rows(hs)
    lo, hi = [], []
    for j in range(dim):
        c = np.zeros(dim)
        c[j] = 1.0
        r1 = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * dim, method="highs")
        r2 = linprog(-c, A_ub=A, b_ub=b, bounds=[(None, None)] * dim, method="highs")
        if r1.status != 0 or r2.status != 0:
            raise ValueError("halfspace body is empty or unbounded")
        pad = 1e-9 * (1 + abs(r1.fun) + abs(r2.fun))
        lo.append(r1.fun - pad)
        hi.append(-r2.fun + pad)
    return BBox(tuple(lo), tuple(hi))


def hpolytope_body(hs, dim: int, antiblocking: bool = False) -> OracleBody:
    A, b = _float_rows(hs)
    slack = b + BAND * (1 + np.abs(A).sum(axis=1) + np.abs(b))

    def member(X):
        return np.all(np.asarray(X, dtype=float) @ A.T <= slack, axis=1)

    def exact(x):
        return all(sum(ai * xi for ai, xi in zip(a, x)) <= bb for a, bb in hs)

    return OracleBody(dim, member, _hbbox(hs, dim), antiblocking, halfspaces=list(hs), exact_contains=exact)


def _steiner_halfspaces(hs, i):
    """Exact H-representation of the shift of an H-polytope along axis ``i``."""
    zero = [(a, b) for a, b in hs if a[i] == 0]
    pos = [(a, b) for a, b in hs if a[i] > 0]
    neg = [(a, b) for a, b in hs if a[i] < 0]
    n = len(hs[0][0])
    out = list(zero)
    e = [Fraction(0)] * n
    e[i] = Fraction(-1)
    out.append((tuple(e), Fraction(0)))
    for ak, bk in pos:
        for al, bl in neg:
            # x_i <= (bk - ak.x')/ak_i - (bl - al.x')/al_i
            a = [ak[j] / ak[i] - al[j] / al[i] if j != i else Fraction(1) for j in range(n)]
            out.append((tuple(a), bk / ak[i] - bl / al[i]))
    return _prune_halfspaces([_primitive(a, b) for a, b in out])


def steiner_shift(K, i: int, line_grid: int = 128, bisect_steps: int = 40) -> OracleBody:
    """Shift every fiber of ``K`` parallel to ``e_i`` so it starts at ``x_i = 0``.

    Anti-blocking inputs come back unchanged.  Polytopes (and earlier exact
    shifts) get an exact H-representation; other oracles are shifted by
    locating each fiber with a grid along the line and bisecting its ends.
    """
    K = as_oracle(K)
    if K.antiblocking:
        return K
    if K.halfspaces is not None:
        return hpolytope_body(_steiner_halfspaces(K.halfspaces, i), K.dim)

    lo_i, hi_i = float(K.bbox.lower[i]), float(K.bbox.upper[i])
    spacing = (hi_i - lo_i) / (line_grid - 1)
    coarse = max(2, line_grid // 8)

    def locate(X: np.ndarray, npts: int):
        """First and last grid values inside each fiber (NaN when the grid misses)."""
        grid = np.linspace(lo_i, hi_i, npts)
        N = len(X)
        reps = np.repeat(X, npts, axis=0)
        reps[:, i] = np.tile(grid, N)
        inside = K.member(reps).reshape(N, npts)
        hit = inside.any(axis=1)
        first = np.where(hit, grid[np.argmax(inside, axis=1)], np.nan)
        last = np.where(hit, grid[npts - 1 - np.argmax(inside[:, ::-1], axis=1)], np.nan)
        return first, last, (hi_i - lo_i) / (npts - 1)

    def fiber_lengths(X: np.ndarray) -> np.ndarray:
        # a coarse grid finds most fibers; only the misses pay for the fine grid
        first, last, step = locate(X, coarse)
        steps = np.full(len(X), step)
        miss = np.nonzero(np.isnan(first))[0]
        if len(miss):
            f2, l2, step2 = locate(X[miss], line_grid)
            first[miss], last[miss], steps[miss] = f2, l2, step2
        length = np.full(len(X), spacing)
        rows = np.nonzero(~np.isnan(first))[0]
        if len(rows):
            st = steps[rows]
            top = _bisect_edge(K, X[rows], i, last[rows], np.minimum(last[rows] + st, hi_i), bisect_steps)
            bot = _bisect_edge(K, X[rows], i, first[rows], np.maximum(first[rows] - st, lo_i), bisect_steps)
            length[rows] = top - bot
        return length

    def member(X):
        X = np.asarray(X, dtype=float)
        L = fiber_lengths(X)
        return (X[:, i] >= -K.tol) & (X[:, i] <= L + K.tol * (1 + np.abs(L)))

    width = hi_i - lo_i
    lower = list(K.bbox.lower)
    upper = list(K.bbox.upper)
    lower[i], upper[i] = 0.0, width
    return OracleBody(K.dim, member, BBox(tuple(lower), tuple(upper)), False, K.tol)


def _bisect_edge(K: OracleBody, X, i, inside_val, outside_val, steps):
    a = inside_val.astype(float).copy()
    b = outside_val.astype(float).copy()
    for _ in range(steps):
        mid = 0.5 * (a + b)
        Y = X.copy()
        Y[:, i] = mid
        ok = K.member(Y)
        a = np.where(ok, mid, a)
        b = np.where(ok, b, mid)
    return a


def shift_chain(K, axes: Sequence[int]) -> OracleBody:
    """Apply shifts right to left, so ``shift_chain(K, [0, 1, 2])`` is ``S_0 S_1 S_2 K``."""
    out = as_oracle(K)
    for i in reversed(list(axes)):
        out = steiner_shift(out, i)
    return out


# checks -----------------------------------------------------------------

def sample_oracle(K: OracleBody, count: int, rng: np.random.Generator, max_rounds: int = 10_000) -> np.ndarray:
    """Uniform points of ``K`` by rejection from its box."""
    lo = np.array([float(v) for v in K.bbox.lower])
    hi = np.array([float(v) for v in K.bbox.upper])
    got = []
    total = 0
    for _ in range(max_rounds):
        X = lo + (hi - lo) * rng.random((max(256, 2 * count), K.dim))
        X = X[K.member(X)]
        got.append(X)
        total += len(X)
        if total >= count:
            break
    pts = np.concatenate(got)[:count]
    if len(pts) < count:
        raise RuntimeError("rejection sampling failed to find enough points")
    return pts


def _describe(K) -> dict:
    if isinstance(K, AntiBlockingBody):
        return {"kind": "antiblocking", **K.to_json()}
    if isinstance(K, VPolytope):
        return {"kind": "vpolytope", "dim": K.dim, "vertices": [[str(v) for v in x] for x in K.vertices]}
    return {"kind": "oracle", "dim": K.dim}


def sym_inclusion_check(A: Body, B: Body, p: LpParam, samples: int = 1000, seed: int = 0,
                        axis: int = 0) -> CheckReport:
    """Points of ``S_i A (+)_p S_i B``, built from sampled witnesses, must lie in ``S_i(A (+)_p B)``."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 55]))
    SA, SB = steiner_shift(A, axis), steiner_shift(B, axis)
    a = sample_oracle(SA, samples, rng)
    b = sample_oracle(SB, samples, rng)
    t = rng.random(samples)
    s, u = _st(t, p)
    X = s[:, None] * a + u[:, None] * b
    target = steiner_shift(lp_sum_oracle(A, B, p), axis)
    violations = int((~target.member(X)).sum())
    return CheckReport("lemma5.5", {"A": _describe(A), "B": _describe(B), "p": p.label(), "axis": axis + 1,
                                    "samples": samples, "seed": seed},
                       lhs=violations, rhs=0, constant=0, method="numeric",
                       details={"violations": violations})


def _lp_sum_volume_mc(A: AntiBlockingBody, B: AntiBlockingBody, p: LpParam, samples: int, seed: int,
                      jobs=None) -> VolumeEstimate:
    K = lp_sum_oracle(A, B, p)
    return mc_volume(K.member, K.bbox, samples, seed, jobs)


def rk_lp_check(A: AntiBlockingBody, B: AntiBlockingBody, p: LpParam, samples: int = 100_000,
                seed: int = 0, jobs=None) -> CheckReport:
    """``|A (+)_p B| <= |A (+)_p -B|``: exact at the endpoints, Monte Carlo left side otherwise."""
    inst = {"A": A.to_json()["generators"], "B": B.to_json()["generators"], "n": A.dim, "p": p.label()}
    rhs = lp_diff_volume(A, B, p)
    if p.kind is LpKind.ONE:
        return CheckReport("lemma5.7", inst, exact_volume(minkowski_sum(A, B)), diff_volume_decomp(A, B), 1, "exact")
    if p.kind is LpKind.INF:
        lhs = exact_volume(make_vpolytope(list(A.orbit.vertices) + list(B.orbit.vertices)))
        return CheckReport("lemma5.7", inst, lhs, rhs, 1, "exact")
    est = _lp_sum_volume_mc(A, B, p, samples, seed, jobs)
    inst.update(samples=samples, seed=seed)
    return CheckReport("lemma5.7", inst, est.value, float(rhs), 1, "mc", lhs_stderr=est.stderr)


def rogers_shephard_lp_check(K: AntiBlockingBody, p: LpParam) -> CheckReport:
    """``|K (+)_p -K| <= kappa_{n,q} |K|`` with equality flagged for simplices."""
    from .constants import kappa_const
    n = K.dim
    vol = exact_volume(K)
    lhs = lp_diff_volume(K, K, p)
    kap = kappa_const(n, p)
    kappa = kap.exact if kap.exact is not None else kap.approx
    rhs = kappa * vol
    exact = isinstance(lhs, Fraction) and isinstance(rhs, Fraction)
    lower = 2 ** (n * float(p.p_inv)) * float(vol)
    eq = abs(float(lhs) - float(rhs)) <= 1e-9 * float(rhs)
    return CheckReport("lemma5.9", {"K": K.to_json()["generators"], "n": n, "p": p.label()},
                       lhs=lhs, rhs=rhs, constant=kappa, method="exact" if exact else "numeric",
                       details={"equality": eq, "is_simplex": is_simplex(K),
                                "lower_bound": lower, "lower_bound_holds": float(lhs) >= lower - 1e-9})


def is_simplex(K: AntiBlockingBody) -> bool:
    """Generators are positive multiples of the ``n`` basis vectors."""
    n = K.dim
    if len(K.generators) != n:
        return False
    seen = set()
    for g in K.generators:
        nz = [j for j, v in enumerate(g) if v != 0]
        if len(nz) != 1:
            return False
        seen.add(nz[0])
    return len(seen) == n


def lp_difference_volume_mc(A: AntiBlockingBody, Bs: Sequence[AntiBlockingBody], p: LpParam, samples: int,
                            seed: int, jobs=None) -> VolumeEstimate:
    K = lp_difference_oracle(A, Bs, p)
    return mc_volume(K.member, K.bbox, samples, seed, jobs)


__all__ = [
    "OracleBody", "as_oracle", "lp_sum_oracle", "lp_sum_contains", "lp_sum_slack", "lp_difference_oracle",
    "steiner_shift", "shift_chain", "sym_inclusion_check", "rk_lp_check", "rogers_shephard_lp_check",
    "lp_difference_volume_mc", "hpolytope_body", "sample_oracle", "lp_combine", "is_simplex",
]
