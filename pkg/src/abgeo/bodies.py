"""Anti-blocking bodies, vertex polytopes and coordinate subspaces.

An anti-blocking body is stored as a pruned set of nonnegative rational
generators; the body itself is the down-closure (inside the positive orthant)
of their convex hull.  Projections, Minkowski sums and membership all act on
generators directly.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .hull import Hull, convex_hull
from .lp import convex_combination_feasible, dominated_certified, linprog_exact
from .numerics import rat_to_str

Point = tuple[Fraction, ...]


class BodyError(ValueError):
    """Invalid body construction."""


@dataclass(frozen=True)
class CoordSubspace:
    """Span of the basis vectors ``e_j`` for ``j`` in a bitmask (0-based bits).

    Note the convention: this stores the *spanning* index set.  A subspace
    written as the orthogonal complement of ``span{e_j : j in tau}`` is
    ``CoordSubspace.spanned_by(n, tau).complement()``.
    """

    dim: int
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.dim:
            raise ValueError(f"mask {self.mask:b} out of range for dimension {self.dim}")

    @classmethod
    def spanned_by(cls, dim: int, idx: Iterable[int]) -> "CoordSubspace":
        mask = 0
        for j in idx:
            if not 0 <= j < dim:
                raise ValueError(f"coordinate {j} out of range for dimension {dim}")
            mask |= 1 << j
        return cls(dim, mask)

    @classmethod
    def full(cls, dim: int) -> "CoordSubspace":
        return cls(dim, (1 << dim) - 1)

    @property
    def idx(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.dim) if self.mask >> j & 1)

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    def complement(self) -> "CoordSubspace":
        return CoordSubspace(self.dim, ((1 << self.dim) - 1) ^ self.mask)

    def label(self) -> str:
        """1-based index list, e.g. ``{1,3}``."""
        return "{" + ",".join(str(j + 1) for j in self.idx) + "}"


def all_subspaces(n: int) -> Iterator[CoordSubspace]:
    for mask in range(1 << n):
        yield CoordSubspace(n, mask)


def _as_point(v: Sequence) -> Point:
    return tuple(Fraction(x) for x in v)


@dataclass(frozen=True)
class AntiBlockingBody:
    """Down-closure of ``conv(generators)`` in the positive orthant.

    Build through :func:`make_antiblocking`, which prunes; the constructor
    itself trusts its input.  A body of dimension 0 (the point ``{0}`` of the
    trivial space) arises as a projection onto ``{0}``.
    """

    dim: int
    generators: tuple[Point, ...]

    def to_json(self) -> dict:
        return {"dim": self.dim, "generators": [[rat_to_str(v) for v in g] for g in self.generators]}

    def scale(self, t) -> "AntiBlockingBody":
        t = Fraction(t)
        if t < 0:
            raise BodyError("scale factor must be nonnegative")
        return make_antiblocking(self.dim, [tuple(t * v for v in g) for g in self.generators])

    def upper_corner(self) -> Point:
        return tuple(max(g[j] for g in self.generators) for j in range(self.dim))

    @cached_property
    def orbit(self) -> "VPolytope":
        return vertex_orbit(self)


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of a pruned list of rational vertices."""

    dim: int
    vertices: tuple[Point, ...]
    affine_dim: int

    @cached_property
    def hull(self) -> Hull:
        return convex_hull(self.vertices)

    @property
    def full_dimensional(self) -> bool:
        return self.affine_dim == self.dim


Body = Union[AntiBlockingBody, VPolytope]


def _prune_generators(gens: list[Point]) -> list[Point]:
    gens = sorted(set(gens))
    # cheap pass: drop anything coordinatewise dominated by another generator
    keep = []
    for i, g in enumerate(gens):
        if any(j != i and all(a <= b for a, b in zip(g, h)) for j, h in enumerate(gens)):
            continue
        keep.append(g)
    if len(keep) <= 1:
        return keep or gens[-1:]
    out = list(keep)
    i = 0
    while i < len(out):
        rest = out[:i] + out[i + 1:]
        if dominated_certified(rest, out[i]):
            out.pop(i)
        else:
            i += 1
    return out


def make_antiblocking(n: int, generators: Iterable[Sequence]) -> AntiBlockingBody:
    gens = [_as_point(g) for g in generators]
    if n < 0:
        raise BodyError("dimension must be nonnegative")
    if not gens:
        raise BodyError("an anti-blocking body needs at least one generator")
    for g in gens:
        if len(g) != n:
            raise BodyError(f"generator {g} does not have dimension {n}")
        if any(v < 0 for v in g):
            raise BodyError(f"generator {tuple(map(str, g))} has a negative coordinate")
    return AntiBlockingBody(n, tuple(_prune_generators(gens)))


def make_vpolytope(points: Iterable[Sequence]) -> VPolytope:
    pts = [_as_point(p) for p in points]
    if not pts:
        raise BodyError("a polytope needs at least one point")
    h = convex_hull(pts)
    P = VPolytope(len(pts[0]), tuple(h.vertex_points), h.affine_dim)
    if P.vertices == tuple(h.points):
        P.__dict__["hull"] = h
    return P


# canonical families -------------------------------------------------------

def box(*sides) -> AntiBlockingBody:
    a = [Fraction(s) for s in sides]
    if any(s <= 0 for s in a):
        raise BodyError("box side lengths must be positive")
    return make_antiblocking(len(a), [a])


def simplex(*sides) -> AntiBlockingBody:
    a = [Fraction(s) for s in sides]
    if any(s <= 0 for s in a):
        raise BodyError("simplex intercepts must be positive")
    n = len(a)
    return make_antiblocking(n, [tuple(a[i] if j == i else Fraction(0) for j in range(n)) for i in range(n)])


def hanner_pos(n: int, sigma: Iterable[int]) -> AntiBlockingBody:
    """Positive part of conv(cube on ``sigma`` coordinates, cube on the rest); 0-based ``sigma``."""
    s = set(sigma)
    if not s <= set(range(n)):
        raise BodyError("sigma must be a subset of the coordinates")
    g1 = tuple(Fraction(int(j in s)) for j in range(n))
    g2 = tuple(Fraction(int(j not in s)) for j in range(n))
    return make_antiblocking(n, [g1, g2])


def hanner_polytope(n: int, sigma: Iterable[int]) -> VPolytope:
    """Full unconditional Hanner polytope: conv of ``[-1,1]^sigma`` and ``[-1,1]^(sigma^c)``."""
    s = sorted(set(sigma))
    c = [j for j in range(n) if j not in s]
    pts = []
    for part in (s, c):
        for signs in itertools.product((-1, 1), repeat=len(part)):
            v = [Fraction(0)] * n
            for j, e in zip(part, signs):
                v[j] = Fraction(e)
            pts.append(v)
    return make_vpolytope(pts)


def subcube(E: CoordSubspace, side=1) -> AntiBlockingBody:
    side = Fraction(side)
    if side <= 0:
        raise BodyError("subcube side must be positive")
    return make_antiblocking(E.dim, [tuple(side if E.mask >> j & 1 else Fraction(0) for j in range(E.dim))])


def origin(n: int) -> AntiBlockingBody:
    return AntiBlockingBody(n, (tuple(Fraction(0) for _ in range(n)),))


# operations ---------------------------------------------------------------

def project(K: Body, E: CoordSubspace) -> Body:
    """Projection onto ``E`` expressed in the coordinates ``E.idx``."""
    if E.dim != K.dim:
        raise BodyError("subspace and body dimensions differ")
    idx = E.idx
    if isinstance(K, AntiBlockingBody):
        return make_antiblocking(len(idx), [tuple(g[j] for j in idx) for g in K.generators])
    return make_vpolytope([tuple(v[j] for j in idx) for v in K.vertices])


def minkowski_sum(A: AntiBlockingBody, B: AntiBlockingBody) -> AntiBlockingBody:
    if A.dim != B.dim:
        raise BodyError("Minkowski sum of bodies of different dimensions")
    return make_antiblocking(A.dim, [tuple(a + b for a, b in zip(u, w))
                                     for u in A.generators for w in B.generators])


def vpolytope_sum(P: VPolytope, Q: VPolytope) -> VPolytope:
    if P.dim != Q.dim:
        raise BodyError("Minkowski sum of polytopes of different dimensions")
    return make_vpolytope({tuple(a + b for a, b in zip(u, w)) for u in P.vertices for w in Q.vertices})


def as_vpolytope(K: Body) -> VPolytope:
    return K.orbit if isinstance(K, AntiBlockingBody) else K


def difference_polytope(A: Body, B: Body) -> VPolytope:
    """The polytope ``A + (-B)``."""
    return vpolytope_sum(as_vpolytope(A), negate(B))


def vertex_orbit(K: AntiBlockingBody) -> VPolytope:
    """Extreme points of the down-closure: masked generators, pruned."""
    cands = set()
    n = K.dim
    for g in K.generators:
        support = [j for j in range(n) if g[j] != 0]
        for bits in itertools.product((0, 1), repeat=len(support)):
            v = [Fraction(0)] * n
            for j, b in zip(support, bits):
                if b:
                    v[j] = g[j]
            cands.add(tuple(v))
    return make_vpolytope(cands)


def reflect(P: Body, delta: Sequence[int]) -> VPolytope:
    P = as_vpolytope(P)
    if len(delta) != P.dim or any(d not in (-1, 1) for d in delta):
        raise BodyError("reflection needs a sign vector in {-1,1}^n")
    verts = tuple(sorted(tuple(d * x for d, x in zip(delta, v)) for v in P.vertices))
    return VPolytope(P.dim, verts, P.affine_dim)


def negate(P: Body) -> VPolytope:
    return reflect(P, [-1] * P.dim)


def contains(P: Body, x: Sequence) -> bool:
    x = _as_point(x)
    if len(x) != P.dim:
        raise BodyError("point and body dimensions differ")
    if isinstance(P, AntiBlockingBody):
        if any(v < 0 for v in x):
            return False
        if any(all(a <= b for a, b in zip(x, g)) for g in P.generators):
            return True
        return convex_combination_feasible(P.generators, x, dominate=True)
    if P.full_dimensional and P.dim > 0:
        return all(sum(ai * xi for ai, xi in zip(a, x)) <= b for a, b in P.hull.halfspaces())
    return convex_combination_feasible(P.vertices, x)


def support(P: Body, u: Sequence) -> Fraction:
    u = _as_point(u)
    verts = as_vpolytope(P).vertices
    return max(sum(a * b for a, b in zip(u, v)) for v in verts)


def _section_support(P: VPolytope, E: CoordSubspace, u: Sequence[Fraction]) -> Fraction | None:
    """``max <u, x>`` over ``P ∩ E``; None when the section is empty."""
    outside = [j for j in range(P.dim) if not E.mask >> j & 1]
    c = [sum(a * b for a, b in zip(u, v)) for v in P.vertices]
    A_eq = [[v[j] for v in P.vertices] for j in outside] + [[1] * len(P.vertices)]
    b_eq = [0] * len(outside) + [1]
    res = linprog_exact(c, A_eq=A_eq, b_eq=b_eq)
    return res.value if res.status == "optimal" else None


def antiblocking_check(P: Body, directions: int = 8, seed: int = 0) -> bool:
    """Compare support functions of projection and section on every coordinate subspace."""
    P = as_vpolytope(P)
    if any(v < 0 for vert in P.vertices for v in vert):
        return False
    rng = np.random.default_rng(seed)
    n = P.dim
    for E in all_subspaces(n):
        if E.size == 0:
            continue
        idx = E.idx
        dirs = []
        for j in idx:
            for s in (1, -1):
                u = [0] * n
                u[j] = s
                dirs.append(u)
        for _ in range(directions):
            u = [0] * n
            for j in idx:
                u[j] = int(rng.integers(-8, 9))
            dirs.append(u)
        for u in dirs:
            sec = _section_support(P, E, u)
            if sec is None or sec != support(P, u):
                return False
    return True


# parsing ------------------------------------------------------------------

def parse_body(text: str, n: int | None = None) -> AntiBlockingBody:
    """Parse a body string: ``box:2,3``, ``simplex:1,1,1``, ``hanner:1100``,
    ``subcube:1100`` (optionally ``subcube:1100:2`` for the side), ``random:n,k,seed``
    or a path to a JSON body file."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "box":
        return box(*[Fraction(s) for s in arg.split(",")])
    if kind == "simplex":
        return simplex(*[Fraction(s) for s in arg.split(",")])
    if kind == "hanner":
        bits = arg.strip()
        return hanner_pos(len(bits), [j for j, b in enumerate(bits) if b == "1"])
    if kind == "subcube":
        bits, _, side = arg.partition(":")
        E = CoordSubspace.spanned_by(len(bits), [j for j, b in enumerate(bits) if b == "1"])
        return subcube(E, Fraction(side) if side else 1)
    if kind == "random":
        from .harness.instances import random_antiblocking
        dim, k, seed = (int(s) for s in arg.split(","))
        return random_antiblocking(dim, k, seed)
    path = Path(text)
    if path.exists():
        data = json.loads(path.read_text())
        return make_antiblocking(int(data["dim"]), [[Fraction(v) for v in g] for g in data["generators"]])
    raise BodyError(f"unrecognized body specification {text!r}")
