"""Unconditional product measures with decreasing densities.

Each coordinate density is even and non-increasing in ``|t|``; they are
normalized to total mass 1 on ``[0, inf)``.  Measures of bodies are estimated
by uniform sampling of a bounding box weighted by the density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bodies import (AntiBlockingBody, Body, CoordSubspace, as_vpolytope, difference_polytope, make_vpolytope,
                     minkowski_sum, project)
from .constants import llw_const, r_const, zeta
from .covers import UniformCover, bt_check, llw_check, validate_cover
from .lpsum import as_oracle, steiner_shift
from .report import CheckReport
from .volume import VolumeEstimate, diff_volume_decomp, exact_volume, sharded_moments

KINDS = ("exponential", "gaussian", "powerlaw", "flat")
_ALIASES = {"exp": "exponential", "gauss": "gaussian", "normal": "gaussian", "pow": "powerlaw",
            "powerlaw": "powerlaw", "flat": "flat", "lebesgue": "flat", "exponential": "exponential",
            "gaussian": "gaussian"}


@dataclass(frozen=True)
class DensitySpec:
    kind: str
    param: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown density kind {self.kind!r}")
        if self.kind == "powerlaw" and not self.param > 1:
            raise ValueError("power-law exponent must exceed 1")
        if self.kind in ("exponential", "gaussian") and not self.param > 0:
            raise ValueError("density parameter must be positive")

    @classmethod
    def parse(cls, text: str) -> "DensitySpec":
        kind, _, arg = text.strip().partition(":")
        kind = _ALIASES.get(kind.lower())
        if kind is None:
            raise ValueError(f"unknown density {text!r}")
        if kind == "flat":
            return cls("flat", 1.0)
        return cls(kind, float(arg) if arg else (2.0 if kind == "powerlaw" else 1.0))

    def pdf(self, t: np.ndarray) -> np.ndarray:
        a = np.abs(np.asarray(t, dtype=float))
        if self.kind == "exponential":
            return self.param * np.exp(-self.param * a)
        if self.kind == "gaussian":
            s = self.param
            return math.sqrt(2 / math.pi) / s * np.exp(-a * a / (2 * s * s))
        if self.kind == "powerlaw":
            return (self.param - 1) * (1 + a) ** (-self.param)
        return np.ones_like(a)

    def cdf0(self, x: float) -> float:
        """Mass of ``[0, x]``; closed forms for test oracles only."""
        x = abs(float(x))
        if self.kind == "exponential":
            return -math.expm1(-self.param * x)
        if self.kind == "gaussian":
            return math.erf(x / (self.param * math.sqrt(2)))
        if self.kind == "powerlaw":
            return 1 - (1 + x) ** (1 - self.param)
        return x

    def label(self) -> str:
        return "flat" if self.kind == "flat" else f"{self.kind}:{self.param:g}"


@dataclass(frozen=True)
class ProductMeasure:
    coords: tuple[DensitySpec, ...]

    @classmethod
    def parse(cls, text: str) -> "ProductMeasure":
        return cls(tuple(DensitySpec.parse(s) for s in text.split(",") if s.strip()))

    @classmethod
    def iid(cls, n: int, spec: DensitySpec) -> "ProductMeasure":
        return cls((spec,) * n)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def is_flat(self) -> bool:
        return all(c.kind == "flat" for c in self.coords)

    def sub(self, idx: Sequence[int]) -> "ProductMeasure":
        return ProductMeasure(tuple(self.coords[j] for j in idx))

    def density(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.ones(len(X))
        for j, c in enumerate(self.coords):
            out *= c.pdf(X[:, j])
        return out

    def label(self) -> str:
        return ",".join(c.label() for c in self.coords)


def mu_mc(K, mu: ProductMeasure, samples: int = 100_000, seed: int = 0, jobs: int | None = None) -> VolumeEstimate:
    """``mu(K)`` as (box volume) x mean of ``phi * 1_K`` over uniform box points."""
    if K.dim != mu.dim:
        raise ValueError("measure and body dimensions differ")
    if K.dim == 0:
        return VolumeEstimate(Fraction(1), 0.0, 0, "exact", seed)
    O = as_oracle(K)
    vol = O.bbox.volume()
    if vol == 0:
        return VolumeEstimate(0.0, 0.0, samples, "mc", seed)
    s1, s2, N = sharded_moments(O.bbox, samples, seed, lambda X: mu.density(X) * O.member(X), jobs)
    mean = s1 / N
    var = max(s2 / N - mean * mean, 0.0)
    return VolumeEstimate(vol * mean, vol * math.sqrt(var / N), N, "mc", seed)


def mu_project(K: Body, E: CoordSubspace, mu: ProductMeasure, samples: int = 100_000, seed: int = 0,
               jobs: int | None = None) -> VolumeEstimate:
    """``mu_E(P_E K)`` with the sub-product over the coordinates of ``E``."""
    if E.size == 0:
        return VolumeEstimate(Fraction(1), 0.0, 0, "exact", seed)
    if E.size == E.dim:
        return mu_mc(K, mu, samples, seed, jobs)
    return mu_mc(project(K, E), mu.sub(E.idx), samples, seed, jobs)


def _subseed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([seed, 7919, k]).generate_state(1, dtype=np.uint64)[0])


class _Estimator:
    """Independent estimates with distinct derived seeds, memoized per key."""

    def __init__(self, mu, samples, seed, jobs):
        self.mu, self.samples, self.seed, self.jobs = mu, samples, seed, jobs
        self.k = 0
        self.memo = {}

    def __call__(self, key, K, E: CoordSubspace | None = None) -> VolumeEstimate:
        if key not in self.memo:
            self.k += 1
            s = _subseed(self.seed, self.k)
            self.memo[key] = (mu_mc(K, self.mu, self.samples, s, self.jobs) if E is None
                              else mu_project(K, E, self.mu, self.samples, s, self.jobs))
        return self.memo[key]


def _product(terms: Sequence[tuple[VolumeEstimate, int]]) -> tuple[float, float]:
    """Value and delta-method stderr of ``prod est_k ** power_k``."""
    val = 1.0
    rel2 = 0.0
    for est, power in terms:
        v = float(est.value)
        val *= v ** power
        if v > 0:
            rel2 += (power * est.stderr / v) ** 2
        elif est.stderr > 0:
            rel2 = math.inf
    return val, abs(val) * math.sqrt(rel2) if math.isfinite(rel2) else math.inf


def _report(tid, inst, lhs_terms, rhs_terms, const) -> CheckReport:
    lv, ls = _product(lhs_terms)
    rv, rs = _product(rhs_terms)
    return CheckReport(tid, inst, lv, float(const) * rv, const, "mc", lhs_stderr=ls, rhs_stderr=float(const) * rs)


def span_of(n: int, idx) -> CoordSubspace:
    return CoordSubspace.spanned_by(n, idx)


def drop(n: int, tau) -> CoordSubspace:
    """``E_tau``: the span of the coordinates outside ``tau``."""
    return CoordSubspace.spanned_by(n, tau).complement()


def unconditional_hull(K: AntiBlockingBody):
    """The 1-unconditional body generated by all reflections of ``K``."""
    pts = set()
    n = K.dim
    for v in K.orbit.vertices:
        nz = [j for j in range(n) if v[j] != 0]
        for signs in range(1 << len(nz)):
            w = list(v)
            for b, j in enumerate(nz):
                if signs >> b & 1:
                    w[j] = -w[j]
            pts.add(tuple(w))
    return make_vpolytope(pts)


# checks -----------------------------------------------------------------

def thm61_check(K, c: UniformCover, mu: ProductMeasure, samples=100_000, seed=0, jobs=None) -> CheckReport:
    """Measure version of the local Loomis-Whitney inequality (1-unconditional ``K``)."""
    n = K.dim
    if mu.is_flat:
        rep = llw_check(K, c)
        rep.theorem_id = "thm6.1"
        return rep
    est = _Estimator(mu, samples, seed, jobs)
    const = llw_const(n, c)
    lhs = [(est("K", K), c.m - c.lam), (est(("P", c.sigma), K, drop(n, c.sigma)), c.lam)]
    rhs = [(est(("P", p), K, drop(n, p)), 1) for p in c.parts]
    return _report("thm6.1", {"n": n, "cover": c.label(), "measure": mu.label(), "samples": samples, "seed": seed},
                   lhs, rhs, const)


def eq61_check(K, c: UniformCover, mu: ProductMeasure, samples=100_000, seed=0, jobs=None) -> CheckReport:
    """``mu(K)^lam <= prod mu_{sigma_i}(P_{span sigma_i} K)`` for a uniform cover of all coordinates."""
    n = K.dim
    if mu.is_flat:
        rep = bt_check(K, c)
        rep.theorem_id = "eq6.1"
        return rep
    if set(c.sigma) != set(range(n)) or not validate_cover(c):
        raise ValueError("needs a valid uniform cover of all coordinates")
    est = _Estimator(mu, samples, seed, jobs)
    lhs = [(est("K", K), c.lam)]
    rhs = [(est(("S", p), K, span_of(n, p)), 1) for p in c.parts]
    return _report("eq6.1", {"n": n, "cover": c.label(), "measure": mu.label(), "samples": samples, "seed": seed},
                   lhs, rhs, 1)


def thm63_check(A: AntiBlockingBody, B: AntiBlockingBody, E: CoordSubspace, mu: ProductMeasure,
                samples=100_000, seed=0, jobs=None) -> CheckReport:
    """Measure version of the projection-ratio inequality with ``r_{n,i}``."""
    n, i = A.dim, E.size
    const = r_const(n, i).exact
    D = difference_polytope(A, B)
    inst = {"n": n, "E": E.label(), "A": A.to_json()["generators"], "B": B.to_json()["generators"],
            "measure": mu.label()}
    if mu.is_flat:
        lhs = exact_volume(A) / exact_volume(project(A, E)) + exact_volume(B) / exact_volume(project(B, E))
        rhs = const * diff_volume_decomp(A, B) / diff_volume_decomp(project(A, E), project(B, E))
        return CheckReport("thm6.3", inst, lhs, rhs, const, "exact")
    est = _Estimator(mu, samples, seed, jobs)
    a, pa = est("A", A), est("PA", A, E)
    b, pb = est("B", B), est("PB", B, E)
    d, pd = est("D", D), est("PD", D, E)
    l1, s1 = _product([(a, 1), (pa, -1)])
    l2, s2 = _product([(b, 1), (pb, -1)])
    rv, rs = _product([(d, 1), (pd, -1)])
    inst.update(samples=samples, seed=seed)
    return CheckReport("thm6.3", inst, l1 + l2, float(const) * rv, const, "mc",
                       lhs_stderr=math.hypot(s1, s2), rhs_stderr=float(const) * rs)


def sshift_check(K: Body, axis: int, mu: ProductMeasure, samples=100_000, seed=0, jobs=None) -> CheckReport:
    """``mu(S_i K) <= mu(K)`` for a locally anti-blocking polytope ``K``."""
    S = steiner_shift(K, axis)
    inst = {"n": K.dim, "axis": axis + 1, "measure": mu.label(), "samples": samples, "seed": seed}
    est = _Estimator(mu, samples, seed, jobs)
    lhs = est("S", S)
    rhs = est("K", K)
    return CheckReport("lemma6.s-shift", inst, float(lhs.value), float(rhs.value), 1, "mc",
                       lhs_stderr=lhs.stderr, rhs_stderr=rhs.stderr)


def lemma64_check(A: AntiBlockingBody, B: AntiBlockingBody, mu: ProductMeasure, samples=100_000, seed=0,
                  jobs=None) -> CheckReport:
    """``mu(A + B) <= mu(A - B)``."""
    inst = {"n": A.dim, "A": A.to_json()["generators"], "B": B.to_json()["generators"], "measure": mu.label()}
    if mu.is_flat:
        return CheckReport("lemma6.4", inst, exact_volume(minkowski_sum(A, B)), diff_volume_decomp(A, B), 1, "exact")
    est = _Estimator(mu, samples, seed, jobs)
    lhs = est("sum", minkowski_sum(A, B))
    rhs = est("diff", difference_polytope(A, B))
    inst.update(samples=samples, seed=seed)
    return CheckReport("lemma6.4", inst, float(lhs.value), float(rhs.value), 1, "mc",
                       lhs_stderr=lhs.stderr, rhs_stderr=rhs.stderr)


def signed_sum(A: AntiBlockingBody, Bs: Sequence[AntiBlockingBody], signs: Sequence[int]):
    """``A +- B_1 +- ... +- B_m`` as a vertex polytope."""
    plus = A
    minus = None
    for B, s in zip(Bs, signs):
        if s > 0:
            plus = minkowski_sum(plus, B)
        else:
            minus = B if minus is None else minkowski_sum(minus, B)
    return as_vpolytope(plus) if minus is None else difference_polytope(plus, minus)


def thm65_check(A: AntiBlockingBody, Bs: Sequence[AntiBlockingBody], mu: ProductMeasure, samples=100_000,
                seed=0, jobs=None) -> CheckReport:
    """``mu(A)^(m-1) mu(A +- B_1 ... +- B_m) <= zeta_{n,m} prod mu(A - B_i)`` over every sign pattern."""
    n, m = A.dim, len(Bs)
    const = zeta(n, m).exact
    est = _Estimator(mu, samples, seed, jobs)
    inst = {"n": n, "m": m, "A": A.to_json()["generators"], "B": [B.to_json()["generators"] for B in Bs],
            "measure": mu.label(), "samples": samples, "seed": seed}
    worst = None
    for pattern in range(1 << m):
        signs = [1 if pattern >> k & 1 else -1 for k in range(m)]
        S = signed_sum(A, Bs, signs)
        if mu.is_flat:
            lhs = exact_volume(A) ** (m - 1) * exact_volume(S)
            rhs = const * math.prod((diff_volume_decomp(A, B) for B in Bs), start=Fraction(1))
            rep = CheckReport("thm6.5", dict(inst, signs=signs), lhs, rhs, const, "exact")
        else:
            lhs = [(est("A", A), m - 1), (est(("S", pattern), S), 1)]
            rhs = [(est(("D", k), difference_polytope(A, B)), 1) for k, B in enumerate(Bs)]
            rep = _report("thm6.5", dict(inst, signs=signs), lhs, rhs, const)
        score = float(rep.margin) - 3 * rep.stderr
        if worst is None or score < worst[0]:
            worst = (score, rep)
    return worst[1]


def mu_checks(theorem: str, instance: dict, samples: int = 100_000, seed: int = 0, jobs=None) -> CheckReport:
    """Dispatch one measure check by name (``6.1``, ``6.3``, ``s-shift``, ``6.4``, ``6.5``, ``eq6.1``)."""
    mu = instance["mu"]
    if theorem == "6.1":
        return thm61_check(instance["K"], instance["cover"], mu, samples, seed, jobs)
    if theorem == "eq6.1":
        return eq61_check(instance["K"], instance["cover"], mu, samples, seed, jobs)
    if theorem == "6.3":
        return thm63_check(instance["A"], instance["B"], instance["E"], mu, samples, seed, jobs)
    if theorem == "s-shift":
        return sshift_check(instance["K"], instance.get("axis", 0), mu, samples, seed, jobs)
    if theorem == "6.4":
        return lemma64_check(instance["A"], instance["B"], mu, samples, seed, jobs)
    if theorem == "6.5":
        return thm65_check(instance["A"], instance["Bs"], mu, samples, seed, jobs)
    raise KeyError(f"unknown measure check {theorem!r}")


__all__ = ["DensitySpec", "ProductMeasure", "mu_mc", "mu_project", "mu_checks", "unconditional_hull",
           "thm61_check", "eq61_check", "thm63_check", "sshift_check", "lemma64_check", "thm65_check",
           "signed_sum"]
