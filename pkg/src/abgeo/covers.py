"""Uniform covers of coordinate index sets and the local Loomis-Whitney checks.

Index sets are 0-based internally; :meth:`UniformCover.parse` and
:meth:`UniformCover.label` use the 1-based command-line syntax
``sigma=1,2,3;parts=12|23|13;lambda=2``.

Throughout, ``E_tau`` is the span of the coordinates *outside* ``tau``, so a
projection onto ``E_tau`` drops the coordinates in ``tau``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .bodies import Body, CoordSubspace
from .report import CheckReport
from .volume import exact_volume, projection_volume

MAX_COVER_WORK = 24  # |sigma| * m


class CoverError(ValueError):
    pass


@dataclass(frozen=True)
class UniformCover:
    sigma: tuple[int, ...]
    parts: tuple[tuple[int, ...], ...]
    lam: int

    @classmethod
    def make(cls, sigma, parts, lam: int) -> "UniformCover":
        return cls(tuple(sorted(set(sigma))), tuple(tuple(sorted(set(p))) for p in parts), int(lam))

    @classmethod
    def parse(cls, text: str) -> "UniformCover":
        fields = {}
        for chunk in text.split(";"):
            key, _, val = chunk.partition("=")
            fields[key.strip().lower()] = val.strip()
        try:
            sigma = [int(s) - 1 for s in fields["sigma"].split(",") if s]
            parts = []
            for part in fields["parts"].split("|"):
                part = part.strip()
                parts.append([int(c) - 1 for c in (part.split(",") if "," in part else part)])
            lam = int(fields.get("lambda", 1))
        except (KeyError, ValueError) as exc:
            raise CoverError(f"cannot parse cover {text!r}") from exc
        return cls.make(sigma, parts, lam)

    @property
    def m(self) -> int:
        return len(self.parts)

    def label(self) -> str:
        sig = ",".join(str(j + 1) for j in self.sigma)
        sep = "" if all(j < 9 for j in self.sigma) else ","
        parts = "|".join(sep.join(str(j + 1) for j in p) for p in self.parts)
        return f"sigma={sig};parts={parts};lambda={self.lam}"

    def canonical(self) -> "UniformCover":
        """Unordered form (parts sorted)."""
        return UniformCover(self.sigma, tuple(sorted(self.parts)), self.lam)


def validate_cover(c: UniformCover) -> bool:
    if c.lam < 1:
        return False
    s = set(c.sigma)
    if any(not set(p) <= s for p in c.parts):
        return False
    return all(sum(j in p for p in c.parts) == c.lam for j in s)


def enumerate_covers(sigma, m: int, lam: int, dedup: bool = False) -> list[UniformCover]:
    """All ordered ``lam``-uniform covers of ``sigma`` by ``m`` parts.

    Each element independently chooses the ``lam`` parts containing it, so
    there are ``binom(m, lam)^|sigma|`` covers.  ``dedup`` collapses covers
    that differ only by the order of their parts.
    """
    sigma = tuple(sorted(set(sigma)))
    if len(sigma) * m > MAX_COVER_WORK:
        raise CoverError(f"|sigma| * m = {len(sigma) * m} exceeds the enumeration cap {MAX_COVER_WORK}")
    if lam < 1 or lam > m:
        return []
    choices = list(itertools.combinations(range(m), lam))
    out = []
    seen = set()
    for assign in itertools.product(choices, repeat=len(sigma)):
        parts = [[] for _ in range(m)]
        for j, chosen in zip(sigma, assign):
            for k in chosen:
                parts[k].append(j)
        c = UniformCover(sigma, tuple(tuple(p) for p in parts), lam)
        if dedup:
            c = c.canonical()
            if c in seen:
                continue
            seen.add(c)
        out.append(c)
    return out


def iter_covers(sigma, m: int, lam: int) -> Iterator[UniformCover]:
    yield from enumerate_covers(sigma, m, lam)


class ProjectionCache:
    """Exact ``|P_E K|`` per coordinate subspace, computed once."""

    def __init__(self, K: Body):
        self.K = K
        self.n = K.dim
        self._vals: dict[int, Fraction] = {}

    def span(self, idx) -> Fraction:
        """Volume of the projection onto ``span{e_j : j in idx}``."""
        E = CoordSubspace.spanned_by(self.n, idx)
        if E.mask not in self._vals:
            self._vals[E.mask] = exact_volume(self.K) if E.size == self.n else projection_volume(self.K, E)
        return self._vals[E.mask]

    def drop(self, tau) -> Fraction:
        """Volume of the projection onto ``E_tau`` (coordinates of ``tau`` removed)."""
        return self.span([j for j in range(self.n) if j not in set(tau)])


def llw_check(K: Body, c: UniformCover, cache: ProjectionCache | None = None) -> CheckReport:
    """``|K|^(m-lam) |P_{E_sigma} K|^lam <= C * prod |P_{E_sigma_i} K|``, exactly."""
    from .constants import llw_const
    cache = cache or ProjectionCache(K)
    n = K.dim
    const = llw_const(n, c)
    lhs = cache.span(range(n)) ** (c.m - c.lam) * cache.drop(c.sigma) ** c.lam
    rhs = const * math.prod((cache.drop(p) for p in c.parts), start=Fraction(1))
    return CheckReport("thm3.1", {"n": n, "cover": c.label()}, lhs, rhs, const, "exact")


def bt_check(K: Body, c: UniformCover, cache: ProjectionCache | None = None) -> CheckReport:
    """``|K|^lam <= prod |P_{span sigma_i} K|`` for a uniform cover of all coordinates."""
    n = K.dim
    if set(c.sigma) != set(range(n)):
        raise CoverError("this inequality needs a cover of all coordinates")
    if not validate_cover(c):
        raise CoverError("invalid uniform cover")
    cache = cache or ProjectionCache(K)
    lhs = cache.span(range(n)) ** c.lam
    rhs = math.prod((cache.span(p) for p in c.parts), start=Fraction(1))
    return CheckReport("eq2.6", {"n": n, "cover": c.label()}, lhs, rhs, 1, "exact")
