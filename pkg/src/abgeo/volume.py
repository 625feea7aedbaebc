"""Exact and Monte Carlo volumes, and the subspace decomposition formulas."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .bodies import (AntiBlockingBody, Body, BodyError, CoordSubspace, VPolytope, all_subspaces,
                     as_vpolytope, difference_polytope, project)
from .hull import HullError
from .numerics import LpParam, lp_weight
from .report import CheckReport

MAX_EXACT_DIM = 6
MAX_EXACT_POINTS = 6000
SHARD_SIZE = 8192

Oracle = Callable[[np.ndarray], np.ndarray]


class VolumeResourceError(RuntimeError):
    """Input beyond the desk-scale limits of the exact volume routine."""


@dataclass(frozen=True)
class VolumeEstimate:
    value: float | Fraction
    stderr: float
    samples: int
    method: str  # "exact" or "mc"
    seed: int | None = None

    def __post_init__(self):
        if self.method == "exact" and self.stderr != 0:
            raise ValueError("exact estimates have zero stderr")

    def to_dict(self) -> dict:
        v = str(self.value) if isinstance(self.value, Fraction) else float(self.value)
        return {"value": v, "stderr": float(self.stderr), "samples": self.samples,
                "method": self.method, "seed": self.seed}


@dataclass(frozen=True)
class BBox:
    """Axis-parallel sampling box ``prod [lower_i, upper_i]``."""

    lower: tuple
    upper: tuple

    @classmethod
    def orthant(cls, upper: Sequence) -> "BBox":
        return cls(tuple(Fraction(0) for _ in upper), tuple(Fraction(u) for u in upper))

    @classmethod
    def of(cls, P: Body) -> "BBox":
        verts = as_vpolytope(P).vertices
        n = len(verts[0])
        return cls(tuple(min(v[j] for v in verts) for j in range(n)),
                   tuple(max(v[j] for v in verts) for j in range(n)))

    @property
    def dim(self) -> int:
        return len(self.upper)

    def volume(self) -> float:
        return math.prod(float(u) - float(l) for l, u in zip(self.lower, self.upper))

    def is_degenerate(self) -> bool:
        return any(u <= l for l, u in zip(self.lower, self.upper))


def _low_dim_antiblocking_volume(K: AntiBlockingBody) -> Fraction:
    """Pruned generators are the extreme points of the upper staircase, so no hull is needed."""
    if K.dim == 1:
        return max(g[0] for g in K.generators)
    chain = sorted(K.generators)  # x ascending, hence y descending
    pts = [(Fraction(0), Fraction(0)), (chain[-1][0], Fraction(0)), *reversed(chain), (Fraction(0), chain[0][1])]
    twice = sum((x0 * y1 - x1 * y0 for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1])), Fraction(0))
    return twice / 2


def exact_volume(P: Body, affine: bool = False) -> Fraction:
    """Exact Lebesgue volume in the ambient space.

    With ``affine`` the measure is taken in the body's own affine dimension
    (supported only when that affine hull is parallel to a coordinate subspace,
    which covers every projection and subcube used here).  A point, and
    anything in dimension 0, has measure 1 under that convention.
    """
    if isinstance(P, AntiBlockingBody) and not affine and P.dim in (1, 2):
        return _low_dim_antiblocking_volume(P)
    V = as_vpolytope(P)
    if V.dim == 0:
        return Fraction(1)
    if V.dim > MAX_EXACT_DIM or len(V.vertices) > MAX_EXACT_POINTS:
        raise VolumeResourceError(f"exact volume limited to dimension <= {MAX_EXACT_DIM} and "
                                  f"<= {MAX_EXACT_POINTS} vertices (got {V.dim}, {len(V.vertices)})")
    try:
        h = V.hull
    except HullError as exc:
        raise VolumeResourceError(str(exc)) from exc
    if h.full_dimensional:
        return h.volume
    if not affine:
        return Fraction(0)
    if not h.is_coordinate_parallel():
        raise ValueError("affine measure requires a coordinate-parallel affine hull")
    return h.volume


def projection_volume(K: Body, E: CoordSubspace) -> Fraction:
    """``|P_E K|`` as an ``|E|``-dimensional volume; 1 when ``E = {0}``."""
    if E.size == 0:
        return Fraction(1)
    return exact_volume(project(K, E))


def diff_volume_decomp(A: AntiBlockingBody, B: AntiBlockingBody) -> Fraction:
    """``|A - B|`` as the sum over coordinate subspaces of ``|P_E A| |P_{E^perp} B|``."""
    if A.dim != B.dim:
        raise BodyError("bodies of different dimensions")
    return sum((projection_volume(A, E) * projection_volume(B, E.complement()) for E in all_subspaces(A.dim)),
               Fraction(0))


def lp_diff_volume(A: AntiBlockingBody, B: AntiBlockingBody, p: LpParam) -> Fraction | float:
    """Subspace-weighted version for the L_p difference; exact at both endpoints."""
    if A.dim != B.dim:
        raise BodyError("bodies of different dimensions")
    n = A.dim
    total = Fraction(0)
    for E in all_subspaces(n):
        w = lp_weight(n, E.size, p)
        total = total + w * projection_volume(A, E) * projection_volume(B, E.complement())
    return total


def _support_mask(K: AntiBlockingBody) -> int:
    mask = 0
    for g in K.generators:
        for j, v in enumerate(g):
            if v:
                mask |= 1 << j
    return mask


def direct_lp_sum_volume(A: AntiBlockingBody, B: AntiBlockingBody, p: LpParam,
                         E: CoordSubspace | None = None) -> Fraction | float:
    """Volume of the L_p sum of bodies living in complementary coordinate subspaces.

    ``E`` (the subspace carrying ``A``) defaults to the coordinate support of ``A``.
    """
    if A.dim != B.dim:
        raise BodyError("bodies of different dimensions")
    n = A.dim
    if E is None:
        E = CoordSubspace(n, _support_mask(A))
    if _support_mask(A) & ~E.mask or _support_mask(B) & E.mask:
        raise BodyError("bodies are not supported on complementary coordinate subspaces")
    return lp_weight(n, E.size, p) * projection_volume(A, E) * projection_volume(B, E.complement())


# Monte Carlo ------------------------------------------------------------

def default_jobs() -> int:
    env = os.environ.get("ABGEO_JOBS")
    if env:
        return max(1, int(env))
    return 1


def shard_rng(seed: int, shard: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed) & (2**64 - 1), shard])))


def sharded_moments(box: BBox, samples: int, seed: int, kernel: Callable[[np.ndarray], np.ndarray],
                    jobs: int | None = None) -> tuple[float, float, int]:
    """Sum and sum of squares of ``kernel`` over uniform points of ``box``.

    Points come in fixed-size shards, each with its own counter-based stream,
    and the shard results are summed in shard order, so the outcome does not
    depend on ``jobs``.
    """
    lo = np.array([float(v) for v in box.lower])
    hi = np.array([float(v) for v in box.upper])
    nshards = max(1, math.ceil(samples / SHARD_SIZE))
    sizes = [SHARD_SIZE] * (nshards - 1) + [samples - SHARD_SIZE * (nshards - 1)]

    def run(s: int):
        X = lo + (hi - lo) * shard_rng(seed, s).random((sizes[s], box.dim))
        vals = np.asarray(kernel(X), dtype=float)
        return float(vals.sum()), float(np.dot(vals, vals))

    jobs = jobs or default_jobs()
    if jobs > 1 and nshards > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(run, range(nshards)))
    else:
        parts = [run(s) for s in range(nshards)]
    return sum(p[0] for p in parts), sum(p[1] for p in parts), samples


def mc_volume(oracle: Oracle, box: BBox, samples: int, seed: int, jobs: int | None = None) -> VolumeEstimate:
    if samples < 1:
        raise ValueError("samples must be positive")
    vol = box.volume()
    if vol == 0:
        return VolumeEstimate(0.0, 0.0, samples, "mc", seed)
    hits, _, N = sharded_moments(box, samples, seed, lambda X: oracle(X).astype(float), jobs)
    f = hits / N
    return VolumeEstimate(vol * f, vol * math.sqrt(f * (1 - f) / N), N, "mc", seed)


def polytope_oracle(P: Body, rtol: float = 1e-12) -> Oracle:
    """Vectorized float membership test from the exact facet inequalities."""
    V = as_vpolytope(P)
    if not V.full_dimensional:
        raise ValueError("membership oracle needs a full-dimensional polytope")
    hs = V.hull.halfspaces()
    A = np.array([[float(v) for v in a] for a, _ in hs])
    b = np.array([float(bb) for _, bb in hs])
    scale = np.abs(A).sum(axis=1) * max(1.0, max(float(abs(c)) for v in V.vertices for c in v)) + np.abs(b)
    slack = b + rtol * scale

    def member(X: np.ndarray) -> np.ndarray:
        return np.all(X @ A.T <= slack, axis=1)

    return member


def gauge_bisect(member: Oracle, X: np.ndarray, iters: int = 60) -> np.ndarray:
    """``inf {lam > 0 : x in lam K}`` by bisection on ray membership (``K`` star-shaped about 0)."""
    X = np.asarray(X, dtype=float)
    hi = np.ones(len(X))
    for _ in range(200):
        bad = ~member(X / hi[:, None])
        if not bad.any():
            break
        hi[bad] *= 2.0
    lo = np.zeros(len(X))
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = member(X / np.maximum(mid, 1e-300)[:, None])
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return hi


def volint_identity_check(K: AntiBlockingBody, q: float, samples: int = 100_000, seed: int = 0,
                          jobs: int | None = None) -> CheckReport:
    """Monte Carlo check of ``|K| = Gamma(1+n/q)^{-1} * integral of exp(-||x||_K^q)``.

    The integral is over the positive orthant (the gauge is infinite elsewhere)
    and uses a product-exponential proposal matched to the extent of ``K``.
    """
    n = K.dim
    member = polytope_oracle(K)
    ext = np.array([float(v) for v in K.upper_corner()])
    rates = 1.0 / (n * ext)
    q = float(q)
    nshards = max(1, math.ceil(samples / SHARD_SIZE))
    sizes = [SHARD_SIZE] * (nshards - 1) + [samples - SHARD_SIZE * (nshards - 1)]

    def run(s):
        X = shard_rng(seed, s).exponential(1.0, (sizes[s], n)) / rates
        g = np.prod(rates) * np.exp(-(X * rates).sum(axis=1))
        w = np.exp(-gauge_bisect(member, X) ** q) / g
        return float(w.sum()), float(np.dot(w, w))

    jobs = jobs or default_jobs()
    if jobs > 1 and nshards > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(run, range(nshards)))
    else:
        parts = [run(s) for s in range(nshards)]
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    norm = math.gamma(1 + n / q)
    est, se = mean / norm, math.sqrt(var / samples) / norm
    exact = exact_volume(K)
    return CheckReport("eq.volint", {"n": n, "q": q, "generators": K.to_json()["generators"],
                                     "samples": samples, "seed": seed},
                       lhs=est, rhs=exact, constant=1.0, method="mc", lhs_stderr=se, relation="==")


def difference_volume(A: Body, B: Body) -> Fraction:
    """Exact ``|A + (-B)|`` straight from the vertex polytope (no decomposition)."""
    return exact_volume(difference_polytope(A, B))

