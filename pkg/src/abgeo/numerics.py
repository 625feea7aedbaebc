"""Exact rationals, binomial coefficients and the Gamma-family special functions.

Rationals are :class:`fractions.Fraction`, which is always held in lowest
terms with a positive denominator, so equality of two results is syntactic.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

Rat = Fraction
Number = Union[int, Fraction, float]

EULER_GAMMA = 0.57721566490153286060651209

# Bernoulli coefficients B_{2k} / (2k) of the digamma asymptotic expansion.
_DIGAMMA_SERIES = (
    1.0 / 12,
    -1.0 / 120,
    1.0 / 252,
    -1.0 / 240,
    1.0 / 132,
    -691.0 / 32760,
    1.0 / 12,
)


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


def as_rat(x: Number | str) -> Fraction:
    """Coerce ints, Fractions, decimal/ratio strings and floats to a Fraction.

    Floats are converted exactly (binary expansion), so ``as_rat(0.1)`` is not
    ``1/10``; pass strings when the decimal value is intended.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError(f"cannot represent {x!r} as a rational")
    return Fraction(x)


def rat_to_str(x: Fraction | int) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    return str(Fraction(x))


def rat_from_str(s: str) -> Fraction:
    return Fraction(s.strip())


def binom_exact(n: int, k: int) -> Fraction:
    """Integer binomial coefficient as an exact rational; 0 outside ``0 <= k <= n``."""
    if n < 0:
        raise ValueError(f"binom_exact requires n >= 0, got {n}")
    if k < 0 or k > n:
        return Fraction(0)
    return Fraction(math.comb(n, k))


def log_gamma(x: float) -> float:
    """``ln Gamma(x)`` for ``x > 0``.

    Backed by the C library ``lgamma`` (about 15 significant digits).
    """
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"log_gamma requires a positive finite argument, got {x!r}")
    return math.lgamma(x)


def gen_binom(x: float, y: float) -> float:
    """Gamma-function binomial ``Gamma(x+1) / (Gamma(y+1) Gamma(x-y+1))``.

    Evaluated in log space so that arguments in the hundreds do not overflow.
    Integer arguments within ``0 <= y <= x`` are returned exactly as floats of
    the integer binomial.
    """
    x, y = float(x), float(y)
    for arg in (x + 1, y + 1, x - y + 1):
        if not math.isfinite(arg) or arg <= 0:
            raise DomainError(f"gen_binom({x}, {y}): Gamma argument {arg} is not positive")
    if x.is_integer() and y.is_integer():
        return float(math.comb(int(x), int(y)))
    return math.exp(log_gamma(x + 1) - log_gamma(y + 1) - log_gamma(x - y + 1))


def digamma(z: float) -> float:
    """Digamma function for ``z > 0``.

    Shifts ``z`` up with ``psi(z) = psi(z+1) - 1/z`` until ``z >= 8`` and then
    sums the asymptotic series, which is accurate to ~1e-15 there.
    """
    z = float(z)
    if not math.isfinite(z) or z <= 0:
        raise DomainError(f"digamma requires z > 0, got {z!r}")
    shift = 0.0
    while z < 8.0:
        shift -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0.0
    power = inv2
    for coeff in _DIGAMMA_SERIES:
        series += coeff * power
        power *= inv2
    return shift + math.log(z) - 0.5 / z - series


class LpKind(enum.Enum):
    """Which part of the L_p scale a parameter sits on."""

    ONE = "1"  # p = 1, conjugate q infinite
    FINITE = "finite"  # 1 < p < infinity
    INF = "inf"  # p infinite, conjugate q = 1


@dataclass(frozen=True)
class LpParam:
    """An exponent ``p >= 1`` together with its conjugate ``q``.

    The two endpoints are enum variants, never float sentinels.  ``q_inv`` is
    ``1/q = 1 - 1/p``; it is exact whenever ``p`` is rational, and every Gamma
    argument of the form ``k/q`` is computed as ``k * q_inv``.
    """

    kind: LpKind
    p_value: Fraction | float | None = None

    def __post_init__(self):
        if self.kind is LpKind.FINITE:
            p = self.p_value
            if p is None or not (p > 1) or (isinstance(p, float) and not math.isfinite(p)):
                raise ValueError(f"finite L_p parameter needs p > 1, got {p!r}")
        elif self.p_value is not None:
            raise ValueError("endpoint L_p parameters carry no numeric value")

    @classmethod
    def from_p(cls, p: Number | str) -> "LpParam":
        if isinstance(p, str):
            s = p.strip().lower()
            if s in ("inf", "infinity", "oo"):
                return cls(LpKind.INF)
            p = Fraction(s)
        if isinstance(p, float) and math.isinf(p):
            return cls(LpKind.INF)
        if not isinstance(p, float):
            p = Fraction(p)
        if p == 1:
            return cls(LpKind.ONE)
        if p < 1:
            raise ValueError(f"L_p parameter must satisfy p >= 1, got {p}")
        return cls(LpKind.FINITE, p)

    @classmethod
    def from_q(cls, q: Number | str) -> "LpParam":
        return cls.from_p(q).conjugate()

    def conjugate(self) -> "LpParam":
        if self.kind is LpKind.ONE:
            return LpParam(LpKind.INF)
        if self.kind is LpKind.INF:
            return LpParam(LpKind.ONE)
        p = self.p_value
        return LpParam(LpKind.FINITE, p / (p - 1))

    @property
    def q_inv(self) -> Fraction | float:
        if self.kind is LpKind.ONE:
            return Fraction(0)
        if self.kind is LpKind.INF:
            return Fraction(1)
        return 1 - 1 / self.p_value

    @property
    def p_inv(self) -> Fraction | float:
        if self.kind is LpKind.ONE:
            return Fraction(1)
        if self.kind is LpKind.INF:
            return Fraction(0)
        return 1 / self.p_value

    @property
    def p(self) -> float:
        """``p`` as a float (``math.inf`` for the infinite endpoint); display only."""
        if self.kind is LpKind.ONE:
            return 1.0
        if self.kind is LpKind.INF:
            return math.inf
        return float(self.p_value)

    @property
    def q(self) -> float:
        return self.conjugate().p

    def label(self) -> str:
        if self.kind is LpKind.ONE:
            return "1"
        if self.kind is LpKind.INF:
            return "inf"
        return str(self.p_value)

    def __str__(self) -> str:
        return self.label()


def gamma_factor(num: Sequence[int], den: Sequence[int], lp: LpParam) -> Fraction | float:
    """``prod Gamma(1 + a/q) / prod Gamma(1 + b/q)`` over ``a in num``, ``b in den``.

    Exact (a Fraction of factorials) when every argument ``a/q`` is an integer,
    which covers both endpoints ``q = 1`` and ``q = infinity``.
    """
    qi = lp.q_inv
    args_num = [a * qi for a in num]
    args_den = [b * qi for b in den]
    if all(isinstance(a, Fraction) and a.denominator == 1 for a in args_num + args_den):
        top = math.prod(math.factorial(int(a)) for a in args_num)
        bottom = math.prod(math.factorial(int(b)) for b in args_den)
        return Fraction(top, bottom)
    log = sum(log_gamma(1.0 + float(a)) for a in args_num)
    log -= sum(log_gamma(1.0 + float(b)) for b in args_den)
    return math.exp(log)


def lp_weight(n: int, i: int, lp: LpParam) -> Fraction | float:
    """Volume weight ``gen_binom(n/q, i/q)^{-1}`` of a direct L_p sum of an
    ``i``-dimensional and an ``(n-i)``-dimensional body."""
    return gamma_factor([i, n - i], [n], lp)
