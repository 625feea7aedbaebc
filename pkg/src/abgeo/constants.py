"""Sharp constants by exhaustive grid maximization, cross-checked against closed forms.

The grid search is the source of truth; closed forms and bounds are asserted
against it and a disagreement raises :class:`ClosedFormMismatch`.  Every
``d_{n,m}`` expression is symmetric in its arguments, so grids range over
nondecreasing tuples, and ties go to the lexicographically smallest tuple.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .numerics import LpKind, LpParam, binom_exact, digamma, gamma_factor

GRID_CAP_N_LARGE_M = 12  # m >= 4: grid limited to n <= 12


class ClosedFormMismatch(AssertionError):
    """Grid maximum disagrees with a closed form or a proven bound."""


class ConstantDomainError(ValueError):
    """Arguments outside the domain of a constant."""


@dataclass(frozen=True)
class ConstantResult:
    id: str
    approx: float
    exact: Fraction | None = None
    argmax: tuple[int, ...] | None = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.exact is not None and abs(self.approx - float(self.exact)) > 1e-9 * abs(float(self.exact)):
            raise ValueError("approximate and exact values disagree")

    @property
    def value(self) -> Fraction | float:
        return self.exact if self.exact is not None else self.approx


def _exactness(x) -> tuple[float, Fraction | None]:
    return (float(x), x) if isinstance(x, Fraction) else (float(x), None)


def d_nm(n: int, alphas: Sequence[int]) -> Fraction:
    """``prod binom(alpha_i, N) / binom(n, N)^(m-1)`` with ``N = sum alpha - n(m-1)``."""
    m = len(alphas)
    if n < 0 or m < 1:
        raise ConstantDomainError("need n >= 0 and at least one alpha")
    if any(a < 0 or a > n for a in alphas):
        raise ConstantDomainError(f"every alpha must lie in [0, {n}], got {tuple(alphas)}")
    N = sum(alphas) - n * (m - 1)
    if N < 0:
        raise ConstantDomainError(f"N = sum(alpha) - n(m-1) = {N} is negative for {tuple(alphas)}")
    num = math.prod(math.comb(a, N) for a in alphas)
    return Fraction(num, math.comb(n, N) ** (m - 1))


def _grid(n: int, m: int) -> Iterable[tuple[int, ...]]:
    for alphas in itertools.combinations_with_replacement(range(n + 1), m):
        if sum(alphas) - n * (m - 1) >= 0:
            yield alphas


def _maximize(items: Iterable[tuple[tuple[int, ...], Fraction | float]]):
    """Max value and its first (lexicographically smallest) argument."""
    best, arg = None, None
    for a, v in items:
        if best is None or v > best:
            best, arg = v, a
    return best, arg


def _check_m(n: int, m: int):
    if n < 1 or m < 1:
        raise ConstantDomainError("need n >= 1 and m >= 1")
    if m >= 4 and n > GRID_CAP_N_LARGE_M:
        raise ConstantDomainError(f"grid capped at n <= {GRID_CAP_N_LARGE_M} for m >= 4")


def zeta_closed_form(n: int) -> Fraction:
    """Three-case closed form of ``zeta_{n,2}``."""
    k, r = divmod(n, 3)
    f = math.factorial
    base = Fraction(f(2 * k) ** 3, f(3 * k) * f(k) ** 3)
    if r == 0:
        return base
    if r == 1:
        return base * Fraction((2 * k + 1) ** 2, (k + 1) * (3 * k + 1))
    return base * Fraction(2 * (2 * k + 1) ** 3, (k + 1) * (3 * k + 1) * (3 * k + 2))


def r_closed_form(n: int, i: int) -> Fraction:
    """Two-case (parity of ``i``) closed form of ``r_{n,i}``."""
    k, odd = divmod(i, 2)
    f = math.factorial
    val = Fraction(f(2 * k) * f(n - k) ** 2, f(k) ** 2 * f(n - 2 * k) * f(n))
    if odd:
        val *= Fraction((2 * k + 1) * (n - 2 * k), (k + 1) * (n - k))
    return val


def zeta(n: int, m: int) -> ConstantResult:
    _check_m(n, m)
    best, arg = _maximize((a, d_nm(n, a)) for a in _grid(n, m))
    if m == 2 and best != zeta_closed_form(n):
        raise ClosedFormMismatch(f"zeta_{{{n},2}}: grid {best} != closed form {zeta_closed_form(n)}")
    return ConstantResult("zeta", float(best), best, arg, {"n": n, "m": m})


def r_const(n: int, i: int) -> ConstantResult:
    if not 1 <= i <= n - 1:
        raise ConstantDomainError("r_{n,i} needs 1 <= i <= n-1")
    best, arg = _maximize(((j,), d_nm(n, (i, j))) for j in range(n - i, n + 1))
    if best != r_closed_form(n, i):
        raise ClosedFormMismatch(f"r_{{{n},{i}}}: grid {best} != closed form {r_closed_form(n, i)}")
    return ConstantResult("r", float(best), best, arg, {"n": n, "i": i})


def _pair_term(n: int, i: int, j: int, p: LpParam):
    N = i + j - n
    return d_nm(n, (i, j)) * gamma_factor([N, n], [i, j], p)


def nu_const(n: int, p: LpParam, i: int) -> ConstantResult:
    """Maximum over ``j`` (with ``i + j >= n``) of the Gamma-weighted ``d_{n,2}(i, j)``."""
    if not 1 <= i <= n - 1:
        raise ConstantDomainError("nu(n,p,i) needs 1 <= i <= n-1")
    best, arg = _maximize(((j,), _pair_term(n, i, j, p)) for j in range(n - i, n + 1))
    approx, exact = _exactness(best)
    return ConstantResult("nu", approx, exact, arg, {"n": n, "i": i, "p": p.label()})


def b_lower_bound(n: int) -> float:
    return 2 / (math.e * math.sqrt(math.pi * n)) * (4 / 3) ** n


def b_upper_bound(n: int) -> float:
    return 2 ** (n + 0.5) / math.sqrt(math.pi * n)


def b_const(n: int, p: LpParam) -> ConstantResult:
    if n < 1:
        raise ConstantDomainError("need n >= 1")
    best, arg = _maximize(((i, j), _pair_term(n, i, j, p)) for i, j in _grid(n, 2))
    approx, exact = _exactness(best)
    lo, hi = b_lower_bound(n), b_upper_bound(n)
    if not (lo <= approx * (1 + 1e-12) and approx <= hi * (1 + 1e-12)):
        raise ClosedFormMismatch(f"b({n},{p}) = {approx} outside [{lo}, {hi}]")
    return ConstantResult("b", approx, exact, arg, {"n": n, "p": p.label()})


def kappa_const(n: int, p: LpParam) -> ConstantResult:
    """``kappa_{n,q} = sum_i binom(n,i)^2 / gen_binom(n/q, i/q)``, ``q`` conjugate to ``p``.

    Use :func:`kappa_q` to index by ``q`` directly.
    """
    if n < 1:
        raise ConstantDomainError("need n >= 1")
    total = sum(binom_exact(n, i) ** 2 * gamma_factor([i, n - i], [n], p) for i in range(n + 1))
    approx, exact = _exactness(total)
    lo, hi = 2 ** n, math.comb(2 * n, n)
    if not (lo <= approx * (1 + 1e-12) and approx <= hi * (1 + 1e-12)):
        raise ClosedFormMismatch(f"kappa_{{{n},q}} = {approx} outside [{lo}, {hi}]")
    return ConstantResult("kappa", approx, exact, None, {"n": n, "p": p.label(), "q": p.conjugate().label()})


def kappa_q(n: int, q) -> ConstantResult:
    return kappa_const(n, LpParam.from_q(q))


def varrho_const(n: int, m: int, p: LpParam) -> ConstantResult:
    _check_m(n, m)

    def term(a):
        N = sum(a) - n * (m - 1)
        return d_nm(n, a) * gamma_factor([N] + [n] * (m - 1), list(a), p)

    best, arg = _maximize((a, term(a)) for a in _grid(n, m))
    approx, exact = _exactness(best)
    return ConstantResult("varrho", approx, exact, arg, {"n": n, "m": m, "p": p.label()})


def llw_const(n: int, cover) -> Fraction:
    """Local Loomis-Whitney constant of a uniform cover (0-based index sets)."""
    from .covers import CoverError, validate_cover
    if not validate_cover(cover):
        raise CoverError("invalid uniform cover")
    s = len(cover.sigma)
    if not set(cover.sigma) <= set(range(n)):
        raise CoverError("cover lies outside the coordinates")
    m = len(cover.parts)
    num = math.prod(math.comb(n - len(part), n - s) for part in cover.parts)
    den = math.comb(n, n - s)
    return Fraction(num) / Fraction(den) ** (m - cover.lam) if m >= cover.lam else \
        Fraction(num) * Fraction(den) ** (cover.lam - m)


def weight_log_derivative(n: int, i: int, q: float) -> float:
    """``d/dq log(Gamma(1+i/q) Gamma(1+(n-i)/q) / Gamma(1+n/q))`` through digamma."""
    return (n * digamma(1 + n / q) - i * digamma(1 + i / q) - (n - i) * digamma(1 + (n - i) / q)) / q ** 2


def compute(cid: str, n: int, m: int | None = None, i: int | None = None, p: LpParam | None = None):
    """Dispatch by constant id (used by the command line)."""
    p = p or LpParam(LpKind.ONE)
    if cid == "d":
        raise ConstantDomainError("use d_nm directly with an alpha tuple")
    if cid == "zeta":
        return zeta(n, m or 2)
    if cid == "r":
        return r_const(n, i)
    if cid == "nu":
        return nu_const(n, p, i)
    if cid == "b":
        return b_const(n, p)
    if cid == "kappa":
        return kappa_const(n, p)
    if cid == "varrho":
        return varrho_const(n, m or 2, p)
    raise ConstantDomainError(f"unknown constant id {cid!r}")
