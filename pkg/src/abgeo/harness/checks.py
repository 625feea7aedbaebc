"""Registry of inequality checks.

Every entry builds its instance from ``(n, seed)`` and the parameters, then
returns one :class:`CheckReport`.  Exact arithmetic is used whenever both
sides are rational; Monte Carlo otherwise.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from ..bodies import (AntiBlockingBody, CoordSubspace, all_subspaces, difference_polytope, make_antiblocking,
                      minkowski_sum, project)
from ..constants import nu_const, r_const, zeta, b_const
from ..covers import ProjectionCache, UniformCover, bt_check, enumerate_covers, llw_check
from ..lpsum import lp_difference_volume_mc, rk_lp_check, rogers_shephard_lp_check, sym_inclusion_check
from ..measures import (DensitySpec, ProductMeasure, eq61_check, lemma64_check, sshift_check, thm61_check,
                        thm63_check, thm65_check, unconditional_hull)
from ..numerics import LpKind, LpParam
from ..report import CheckReport
from ..volume import (diff_volume_decomp, exact_volume, lp_diff_volume, projection_volume,
                      volint_identity_check)
from .instances import instance_rng, random_antiblocking, random_family, random_pair

DEFAULT_SAMPLES = 100_000


@dataclass(frozen=True)
class CheckSpec:
    theorem_id: str
    statement: str
    fn: Callable[[int, int, dict], CheckReport]
    max_n: int = 4
    min_n: int = 1
    lp: bool = False  # depends on the L_p parameter
    mc: bool = False  # may use Monte Carlo


REGISTRY: dict[str, CheckSpec] = {}


def register(theorem_id: str, statement: str, max_n: int = 4, lp: bool = False, mc: bool = False, min_n: int = 1):
    def deco(fn):
        REGISTRY[theorem_id] = CheckSpec(theorem_id, statement, fn, max_n, min_n, lp, mc)
        return fn
    return deco


def subseed(theorem_id: str, n: int, seed: int, k: int = 0) -> int:
    ss = np.random.SeedSequence([zlib.crc32(theorem_id.encode()), n, seed, k])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def _lp(params) -> LpParam:
    p = params.get("p", "1")
    return p if isinstance(p, LpParam) else LpParam.from_p(p)


def _measure(n: int, params) -> ProductMeasure:
    spec = params.get("measure", "exp:1")
    mu = spec if isinstance(spec, ProductMeasure) else ProductMeasure.parse(spec)
    if mu.dim == 1 and n > 1:
        mu = ProductMeasure.iid(n, mu.coords[0])
    if mu.dim != n:
        raise ValueError(f"measure has {mu.dim} coordinates for a body in dimension {n}")
    return mu


def _gens(K: AntiBlockingBody):
    return K.to_json()["generators"]


def _rng(theorem_id, n, seed):
    return instance_rng("check", theorem_id, n, seed)


def _random_cover(rng, sigma, m_choices=(2, 3), full_lambda=True) -> UniformCover:
    sigma = list(sigma)
    m = int(rng.choice([m for m in m_choices if len(sigma) * m <= 24]))
    lam = int(rng.integers(1, m + 1)) if full_lambda else 1
    covers = enumerate_covers(sigma, m, lam)
    return covers[int(rng.integers(len(covers)))]


def _worst(reports: list[CheckReport]) -> CheckReport:
    """The report with the largest ``lhs / rhs`` (smallest margin on ties)."""
    def key(r):
        rhs = r.rhs
        ratio = r.lhs / rhs if rhs else (math.inf if r.lhs else 0)
        return (ratio, -r.margin)
    return max(reports, key=key)


# volume identities --------------------------------------------------------

@register("eq2.3", "|A - B| = sum_E |P_E A| |P_{E^perp} B|  (exact identity)", max_n=4)
def _eq23(n, seed, params):
    A, B = random_pair(n, seed)
    lhs = exact_volume(difference_polytope(A, B))
    return CheckReport("eq2.3", {"A": _gens(A), "B": _gens(B)}, lhs, diff_volume_decomp(A, B), 1, "exact",
                       relation="==")


@register("eq2.4", "|A + B| <= |A - B|", max_n=4)
def _eq24(n, seed, params):
    A, B = random_pair(n, seed)
    return CheckReport("eq2.4", {"A": _gens(A), "B": _gens(B)}, exact_volume(minkowski_sum(A, B)),
                       diff_volume_decomp(A, B), 1, "exact")


@register("eq2.6", "|K|^lam <= prod |P_{span sigma_i} K| for a lam-uniform cover of [n]", max_n=5)
def _eq26(n, seed, params):
    rng = _rng("eq2.6", n, seed)
    K = random_antiblocking(n, int(rng.integers(1, n + 2)), seed, "eq2.6")
    c = _random_cover(rng, range(n))
    rep = bt_check(K, c)
    rep.instance["K"] = _gens(K)
    return rep


@register("thm3.1", "|K|^(m-lam) |P_{E_sigma} K|^lam <= C(n, cover) prod |P_{E_sigma_i} K|", max_n=5)
def _thm31(n, seed, params):
    rng = _rng("thm3.1", n, seed)
    K = random_antiblocking(n, int(rng.integers(1, n + 2)), seed, "thm3.1")
    size = int(rng.integers(1, n + 1))
    sigma = sorted(rng.choice(n, size=size, replace=False).tolist())
    c = _random_cover(rng, sigma)
    rep = llw_check(K, c)
    rep.instance["K"] = _gens(K)
    return rep


# cover and signed-sum bounds ----------------------------------------------

@register("lemma4.1", "|A_1 + ... + A_r| <= sum over 1-uniform covers of [n] of prod |P_{span sigma_i} A_i|", max_n=4)
def _lemma41(n, seed, params):
    r = int(params.get("r", 2))
    As = random_family(n, r, seed, "lemma4.1")
    S = As[0]
    for A in As[1:]:
        S = minkowski_sum(S, A)
    caches = [ProjectionCache(A) for A in As]
    covers = enumerate_covers(range(n), r, 1)
    rhs = sum((math.prod((caches[k].span(part) for k, part in enumerate(c.parts)), start=Fraction(1))
               for c in covers), Fraction(0))
    return CheckReport("lemma4.1", {"r": r, "A": [_gens(A) for A in As]}, exact_volume(S), rhs, 1, "exact",
                       details={"covers": len(covers)})


@register("thm4.2", "|A|^(m-1) |P_{E_sigma} A| <= zeta_{n,m} prod |P_{E_sigma_i} A| over 1-uniform covers", max_n=4)
def _thm42(n, seed, params):
    m = int(params.get("m", 2))
    rng = _rng("thm4.2", n, seed)
    A = random_antiblocking(n, int(rng.integers(1, n + 2)), seed, "thm4.2")
    const = zeta(n, m).exact
    cache = ProjectionCache(A)
    vol = cache.span(range(n))
    reps = []
    for E in all_subspaces(n):
        sigma = E.idx
        if len(sigma) * m > 24:
            continue
        for c in enumerate_covers(sigma, m, 1, dedup=True):
            lhs = vol ** (m - 1) * cache.drop(c.sigma)
            rhs = const * math.prod((cache.drop(p) for p in c.parts), start=Fraction(1))
            reps.append(CheckReport("thm4.2", {"m": m, "A": _gens(A), "cover": c.label()}, lhs, rhs, const,
                                    "exact"))
    rep = _worst(reps)
    rep.details["covers_checked"] = len(reps)
    return rep


class _SumProjections:
    """Memoized ``|P_E (K_1 + ... + K_r)|`` for subfamilies of a fixed body list.

    Coordinate projections commute with Minkowski sums, so each factor is
    projected (and pruned) before the sum is formed.
    """

    def __init__(self, bodies):
        self.bodies = list(bodies)
        self._proj: dict = {}
        self._sums: dict = {}

    def _project(self, k: int, E: CoordSubspace):
        key = (k, E.mask)
        if key not in self._proj:
            self._proj[key] = project(self.bodies[k], E)
        return self._proj[key]

    def body(self, ks: tuple, E: CoordSubspace):
        key = (ks, E.mask)
        if key not in self._sums:
            self._sums[key] = (self._project(ks[0], E) if len(ks) == 1 else
                               minkowski_sum(self.body(ks[:-1], E), self._project(ks[-1], E)))
        return self._sums[key]

    def volume(self, ks: tuple, E: CoordSubspace) -> Fraction:
        return Fraction(1) if E.size == 0 else exact_volume(self.body(ks, E))


def signed_volume(A: AntiBlockingBody, Bs, signs, cache: _SumProjections | None = None) -> Fraction:
    """``|A +- B_1 ... +- B_m|`` as ``|(A + sum B_plus) - sum B_minus|`` by decomposition.

    A ``cache`` must be built on a body list that starts with ``A, *Bs``.
    """
    cache = cache or _SumProjections([A, *Bs])
    plus = (0,) + tuple(k + 1 for k, s in enumerate(signs) if s > 0)
    minus = tuple(k + 1 for k, s in enumerate(signs) if s <= 0)
    n = A.dim
    if not minus:
        return cache.volume(plus, CoordSubspace.spanned_by(n, range(n)))
    return sum((cache.volume(plus, E) * cache.volume(minus, E.complement()) for E in all_subspaces(n)),
               Fraction(0))


@register("cor4.3", "|A|^(m-1) |A +- B_1 ... +- B_m| <= zeta_{n,m} prod |A - B_i|, every sign pattern", max_n=4)
def _cor43(n, seed, params):
    m = int(params.get("m", 2))
    A, *Bs = random_family(n, m + 1, seed, "cor4.3")
    const = zeta(n, m).exact
    volA = exact_volume(A)
    rhs = const * math.prod((diff_volume_decomp(A, B) for B in Bs), start=Fraction(1))
    reps = []
    cache = _SumProjections([A, *Bs])
    for pattern in range(1 << m):
        signs = [1 if pattern >> k & 1 else -1 for k in range(m)]
        lhs = volA ** (m - 1) * signed_volume(A, Bs, signs, cache)
        reps.append(CheckReport("cor4.3", {"m": m, "A": _gens(A), "B": [_gens(B) for B in Bs], "signs": signs},
                                lhs, rhs, const, "exact"))
    return _worst(reps)


def _decomp_within(ca: ProjectionCache, cb: ProjectionCache, E: CoordSubspace) -> Fraction:
    """``|P_E (A - B)|`` from cached projections, summing ``|P_F A| |P_G B|`` over splits ``E = F + G``."""
    idx = E.idx
    total = Fraction(0)
    for sub in range(1 << len(idx)):
        F = [j for k, j in enumerate(idx) if sub >> k & 1]
        G = [j for k, j in enumerate(idx) if not sub >> k & 1]
        total += (ca.span(F) if F else 1) * (cb.span(G) if G else 1)
    return total


def ratio_report(A, B, E, tid="thm4.4", caches: tuple | None = None) -> CheckReport:
    """``caches`` is an optional ``(ProjectionCache(A), ProjectionCache(B))`` shared across subspaces."""
    n, i = A.dim, E.size
    const = r_const(n, i).exact
    ca, cb = caches or (ProjectionCache(A), ProjectionCache(B))
    full = CoordSubspace.spanned_by(n, range(n))
    lhs = ca.span(range(n)) / ca.span(E.idx) + cb.span(range(n)) / cb.span(E.idx)
    rhs = const * _decomp_within(ca, cb, full) / _decomp_within(ca, cb, E)
    return CheckReport(tid, {"A": _gens(A), "B": _gens(B), "E": E.label(), "i": i}, lhs, rhs, const, "exact")


@register("thm4.4", "|A|/|P_E A| + |B|/|P_E B| <= r_{n,i} |A - B| / |P_E(A - B)|, every proper E", max_n=4, min_n=2)
def _thm44(n, seed, params):
    A, B = random_pair(n, seed, tag="thm4.4")
    caches = (ProjectionCache(A), ProjectionCache(B))
    reps = [ratio_report(A, B, E, caches=caches) for E in all_subspaces(n) if 0 < E.size < n]
    return _worst(reps)


# L_p sums -----------------------------------------------------------------

def _mc_ratio(num, den):
    v = float(num.value) / float(den.value)
    rel = math.hypot(num.stderr / float(num.value), den.stderr / float(den.value))
    return v, abs(v) * rel


@register("eq5.2", "|A (+)_p -B| = sum_E w_{n,|E|}(p) |P_E A| |P_{E^perp} B|", max_n=4, lp=True, mc=True)
def _eq52(n, seed, params):
    p = _lp(params)
    A, B = random_pair(n, seed, tag="eq5.2")
    inst = {"A": _gens(A), "B": _gens(B), "p": p.label()}
    formula = lp_diff_volume(A, B, p)
    if p.kind is LpKind.ONE:
        return CheckReport("eq5.2", inst, exact_volume(difference_polytope(A, B)), formula, 1, "exact", relation="==")
    if p.kind is LpKind.INF:
        from ..bodies import make_vpolytope, negate
        hull = make_vpolytope(list(A.orbit.vertices) + list(negate(B).vertices))
        return CheckReport("eq5.2", inst, exact_volume(hull), formula, 1, "exact", relation="==")
    samples = int(params.get("samples", DEFAULT_SAMPLES))
    est = lp_difference_volume_mc(A, [B], p, samples, subseed("eq5.2", n, seed), params.get("jobs"))
    inst.update(samples=samples)
    return CheckReport("eq5.2", inst, est.value, float(formula), 1, "mc", lhs_stderr=est.stderr, relation="==")


@register("thm5.4", "|A|/|P_E A| + |B|/|P_E B| <= nu(n,p,i) |A (+)_p -B| / |P_E(A (+)_p -B)|", max_n=3, lp=True, mc=True, min_n=2)
def _thm54(n, seed, params):
    p = _lp(params)
    rng = _rng("thm5.4", n, seed)
    A, B = random_pair(n, seed, tag="thm5.4")
    i = int(rng.integers(1, n))
    E = CoordSubspace.spanned_by(n, sorted(rng.choice(n, size=i, replace=False).tolist()))
    const = nu_const(n, p, i)
    PA, PB = project(A, E), project(B, E)
    lhs = exact_volume(A) / exact_volume(PA) + exact_volume(B) / exact_volume(PB)
    formula_ratio = lp_diff_volume(A, B, p) / lp_diff_volume(PA, PB, p)
    inst = {"A": _gens(A), "B": _gens(B), "E": E.label(), "i": i, "p": p.label()}
    if p.kind is not LpKind.FINITE:
        return CheckReport("thm5.4", inst, lhs, const.exact * formula_ratio, const.exact, "exact")
    samples = int(params.get("samples", DEFAULT_SAMPLES))
    jobs = params.get("jobs")
    full = lp_difference_volume_mc(A, [B], p, samples, subseed("thm5.4", n, seed, 1), jobs)
    proj = lp_difference_volume_mc(PA, [PB], p, samples, subseed("thm5.4", n, seed, 2), jobs)
    ratio, se = _mc_ratio(full, proj)
    inst.update(samples=samples)
    return CheckReport("thm5.4", inst, float(lhs), const.approx * ratio, const.approx, "mc",
                       rhs_stderr=const.approx * se,
                       details={"formula_rhs": const.approx * float(formula_ratio)})


@register("lemma5.5", "S_i(A) (+)_p S_i(B) is contained in S_i(A (+)_p B)", max_n=3, lp=True, mc=True)
def _lemma55(n, seed, params):
    p = _lp(params)
    rng = _rng("lemma5.5", n, seed)
    A1, A2 = random_pair(n, seed, tag="lemma5.5a")
    B, _ = random_pair(n, seed, tag="lemma5.5b")
    A = difference_polytope(A1, A2)
    axis = int(rng.integers(n))
    samples = int(params.get("inclusion_samples", 1000))
    rep = sym_inclusion_check(A, B, p, samples, subseed("lemma5.5", n, seed), axis)
    rep.instance.update(A1=_gens(A1), A2=_gens(A2), B=_gens(B))
    rep.instance.pop("A", None)
    return rep


@register("lemma5.7", "|A (+)_p B| <= |A (+)_p -B|", max_n=3, lp=True, mc=True)
def _lemma57(n, seed, params):
    A, B = random_pair(n, seed, tag="lemma5.7")
    return rk_lp_check(A, B, _lp(params), int(params.get("samples", DEFAULT_SAMPLES)),
                       subseed("lemma5.7", n, seed), params.get("jobs"))


@register("thm5.8", "|A| |A (+)_p -B (+)_p -C| <= b(n,p) |A (+)_p -B| |A (+)_p -C|", max_n=3, lp=True, mc=True)
def _thm58(n, seed, params):
    p = _lp(params)
    A, B, C = random_family(n, 3, seed, "thm5.8")
    const = b_const(n, p)
    inst = {"A": _gens(A), "B": _gens(B), "C": _gens(C), "p": p.label()}
    volA = exact_volume(A)
    if p.kind is LpKind.ONE:
        lhs = volA * diff_volume_decomp(A, minkowski_sum(B, C))
    elif p.kind is LpKind.INF:
        lhs = volA * lp_diff_volume(A, make_antiblocking(n, B.generators + C.generators), p)
    if p.kind is not LpKind.FINITE:
        rhs = const.exact * lp_diff_volume(A, B, p) * lp_diff_volume(A, C, p)
        return CheckReport("thm5.8", inst, lhs, rhs, const.exact, "exact")
    samples = int(params.get("samples", DEFAULT_SAMPLES))
    jobs = params.get("jobs")
    t = lp_difference_volume_mc(A, [B, C], p, samples, subseed("thm5.8", n, seed, 1), jobs)
    ab = lp_difference_volume_mc(A, [B], p, samples, subseed("thm5.8", n, seed, 2), jobs)
    ac = lp_difference_volume_mc(A, [C], p, samples, subseed("thm5.8", n, seed, 3), jobs)
    prod = float(ab.value) * float(ac.value)
    prod_se = prod * math.hypot(ab.stderr / float(ab.value), ac.stderr / float(ac.value))
    formula = const.approx * float(lp_diff_volume(A, B, p)) * float(lp_diff_volume(A, C, p))
    inst.update(samples=samples)
    return CheckReport("thm5.8", inst, float(volA) * t.value, const.approx * prod, const.approx, "mc",
                       lhs_stderr=float(volA) * t.stderr, rhs_stderr=const.approx * prod_se,
                       details={"formula_rhs": formula})


@register("lemma5.9", "|K (+)_p -K| <= kappa_{n,q} |K|, equality for simplices", max_n=5, lp=True)
def _lemma59(n, seed, params):
    rng = _rng("lemma5.9", n, seed)
    K = random_antiblocking(n, int(rng.integers(1, n + 2)), seed, "lemma5.9")
    return rogers_shephard_lp_check(K, _lp(params))


@register("eq.volint", "|K| = Gamma(1+n/q)^-1 * integral of exp(-||x||_K^q)", max_n=3, mc=True)
def _volint(n, seed, params):
    rng = _rng("eq.volint", n, seed)
    K = random_antiblocking(n, int(rng.integers(1, n + 2)), seed, "eq.volint")
    q = float(params.get("q", 2.0))
    return volint_identity_check(K, q, int(params.get("samples", DEFAULT_SAMPLES)), subseed("eq.volint", n, seed),
                                 params.get("jobs"))


# product measures ---------------------------------------------------------

def _mu_args(tid, n, seed, params):
    return (_measure(n, params), int(params.get("samples", DEFAULT_SAMPLES)), subseed(tid, n, seed),
            params.get("jobs"))


@register("thm6.1", "mu(K)^(m-lam) mu(P_{E_sigma} K)^lam <= C(n, cover) prod mu(P_{E_sigma_i} K), K 1-unconditional",
          max_n=3, mc=True)
def _thm61(n, seed, params):
    rng = _rng("thm6.1", n, seed)
    base = random_antiblocking(n, int(rng.integers(1, n + 2)), seed, "thm6.1")
    K = unconditional_hull(base)
    sigma = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist())
    c = _random_cover(rng, sigma)
    rep = thm61_check(K, c, *_mu_args("thm6.1", n, seed, params))
    rep.instance["K_positive_part"] = _gens(base)
    return rep


@register("thm6.3", "mu(A)/mu(P_E A) + mu(B)/mu(P_E B) <= r_{n,i} mu(A - B) / mu(P_E(A - B))", max_n=3, mc=True, min_n=2)
def _thm63(n, seed, params):
    rng = _rng("thm6.3", n, seed)
    A, B = random_pair(n, seed, tag="thm6.3")
    i = int(rng.integers(1, n))
    E = CoordSubspace.spanned_by(n, sorted(rng.choice(n, size=i, replace=False).tolist()))
    return thm63_check(A, B, E, *_mu_args("thm6.3", n, seed, params))


@register("lemma6.s-shift", "mu(S_i K) <= mu(K), K locally anti-blocking", max_n=3, mc=True)
def _sshift(n, seed, params):
    rng = _rng("lemma6.s-shift", n, seed)
    A, B = random_pair(n, seed, tag="lemma6.s-shift")
    rep = sshift_check(difference_polytope(A, B), int(rng.integers(n)), *_mu_args("lemma6.s-shift", n, seed, params))
    rep.instance.update(A=_gens(A), B=_gens(B))
    return rep


@register("lemma6.4", "mu(A + B) <= mu(A - B)", max_n=3, mc=True)
def _lemma64(n, seed, params):
    A, B = random_pair(n, seed, tag="lemma6.4")
    return lemma64_check(A, B, *_mu_args("lemma6.4", n, seed, params))


@register("thm6.5", "mu(A)^(m-1) mu(A +- B_1 ... +- B_m) <= zeta_{n,m} prod mu(A - B_i), every sign pattern",
          max_n=3, mc=True)
def _thm65(n, seed, params):
    m = int(params.get("m", 2))
    A, *Bs = random_family(n, m + 1, seed, "thm6.5")
    return thm65_check(A, Bs, *_mu_args("thm6.5", n, seed, params))


@register("eq6.1", "mu(K)^lam <= prod mu_{sigma_i}(P_{span sigma_i} K) for a lam-uniform cover of [n]", max_n=3, mc=True)
def _eq61(n, seed, params):
    rng = _rng("eq6.1", n, seed)
    A, B = random_pair(n, seed, tag="eq6.1")
    K = difference_polytope(A, B)
    c = _random_cover(rng, range(n))
    rep = eq61_check(K, c, *_mu_args("eq6.1", n, seed, params))
    rep.instance.update(A=_gens(A), B=_gens(B))
    return rep


# --------------------------------------------------------------------------

class UnknownCheck(KeyError):
    pass


def run_check(theorem_id: str, params: dict | None = None, seed: int = 0) -> CheckReport:
    """Run one registered check on the instance determined by ``params["n"]`` and ``seed``."""
    if theorem_id not in REGISTRY:
        raise UnknownCheck(f"unknown theorem id {theorem_id!r}; see --list")
    params = dict(params or {})
    spec = REGISTRY[theorem_id]
    n = int(params.get("n", 3))
    if not spec.min_n <= n <= spec.max_n:
        raise ValueError(f"{theorem_id} supports {spec.min_n} <= n <= {spec.max_n}")
    rep = spec.fn(n, seed, params)
    rep.instance = {**rep.instance, "n": n, "seed": seed}
    return rep


def anchor_table() -> list[tuple[str, str]]:
    return [(tid, REGISTRY[tid].statement) for tid in sorted(REGISTRY)]


__all__ = ["REGISTRY", "CheckSpec", "run_check", "anchor_table", "subseed", "signed_volume", "ratio_report",
           "UnknownCheck", "DensitySpec"]
