"""Seeded random instances.  All seeds are mixed through ``SeedSequence`` so
an instance depends only on its arguments."""

from __future__ import annotations

import zlib
from fractions import Fraction

import numpy as np

from ..bodies import AntiBlockingBody, CoordSubspace, make_antiblocking

DYADIC_BITS = 16


def instance_rng(*key) -> np.random.Generator:
    """Generator keyed by a tuple of ints and strings (strings hashed with crc32)."""
    words = [zlib.crc32(k.encode()) if isinstance(k, str) else int(k) & 0xFFFFFFFF for k in key]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


def random_point(rng: np.random.Generator, n: int) -> tuple[Fraction, ...]:
    """Uniform point of ``(0, 1]^n`` on the dyadic grid ``2^-16``."""
    den = 1 << DYADIC_BITS
    return tuple(Fraction(int(v), den) for v in rng.integers(1, den + 1, size=n))


def random_antiblocking(n: int, k: int, seed: int, tag: str = "body") -> AntiBlockingBody:
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    rng = instance_rng(tag, n, k, seed)
    return make_antiblocking(n, [random_point(rng, n) for _ in range(k)])


def random_pair(n: int, seed: int, k: int | None = None, tag: str = "pair") -> tuple[AntiBlockingBody, AntiBlockingBody]:
    """Two bodies with generator counts in ``1..n+1`` unless ``k`` is fixed."""
    rng = instance_rng(tag, n, seed)
    ka = k or int(rng.integers(1, n + 2))
    kb = k or int(rng.integers(1, n + 2))
    return random_antiblocking(n, ka, seed, tag + ":A"), random_antiblocking(n, kb, seed, tag + ":B")


def random_family(n: int, count: int, seed: int, tag: str = "family") -> list[AntiBlockingBody]:
    rng = instance_rng(tag, n, count, seed)
    return [random_antiblocking(n, int(rng.integers(1, n + 2)), seed, f"{tag}:{r}") for r in range(count)]


def random_subspace(n: int, size: int, seed: int, tag: str = "subspace") -> CoordSubspace:
    rng = instance_rng(tag, n, size, seed)
    return CoordSubspace.spanned_by(n, sorted(rng.choice(n, size=size, replace=False).tolist()))
