"""Exact convex hulls of rational point sets in low dimension.

Qhull proposes a triangulated boundary in floating point; every proposed
facet is then recomputed from its integer vertices and verified against all
input points with a filtered predicate (a float evaluation whose sign is
trusted only outside a rigorous error band, exact integer arithmetic inside).
The boundary must also close up (each ridge shared by exactly two simplices).
If any of this fails, a brute-force exact facet enumeration takes over.

Volumes are exact rationals: a cone from one input point over the verified
boundary simplices, or, on the brute-force path, a recursive pyramid
decomposition over the facets.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

MAX_BRUTE_SUBSETS = 400_000


class HullError(RuntimeError):
    """Hull could not be certified within the desk-scale limits."""


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def to_integer_points(points: Sequence[Sequence[Fraction]]) -> tuple[list[tuple[int, ...]], int]:
    """Scale rational points by the lcm ``D`` of their denominators."""
    D = 1
    for p in points:
        for v in p:
            D = _lcm(D, Fraction(v).denominator)
    ints = [tuple(int(Fraction(v) * D) for v in p) for p in points]
    return ints, D


def bareiss_det(M: list[list[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if A[r][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def rank_and_pivots(rows: Sequence[Sequence]) -> tuple[int, list[int]]:
    """Rank of a rational matrix and the pivot columns of its row echelon form."""
    A = [[Fraction(v) for v in r] for r in rows]
    if not A:
        return 0, []
    ncols = len(A[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        pr = A[r]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c] / pr[c]
                A[i] = [a - f * b for a, b in zip(A[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return r, pivots


def hyperplane_through(pts: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], int] | None:
    """Primitive integer hyperplane ``a.x = b`` through ``k`` points in ``Z^k``.

    Returns None when the points are affinely dependent.
    """
    k = len(pts[0])
    p0 = pts[0]
    diffs = [[p[j] - p0[j] for j in range(k)] for p in pts[1:]]
    a = []
    for j in range(k):
        minor = [row[:j] + row[j + 1:] for row in diffs]
        a.append((-1) ** j * bareiss_det(minor))
    if not any(a):
        return None
    b = sum(ai * xi for ai, xi in zip(a, p0))
    g = reduce(math.gcd, a + [b])
    if g > 1:
        a = [ai // g for ai in a]
        b //= g
    return tuple(a), b


@dataclass
class Hull:
    """Certified convex hull of a finite rational point set.

    ``points`` are the distinct input points in a canonical (sorted) order.
    ``coords`` are ambient coordinate indices onto which the affine hull
    projects injectively; facets, ``vertices`` and ``volume`` live in that
    projected space.  ``volume`` is the ``affine_dim``-dimensional Lebesgue
    measure of the projected hull.
    """

    dim: int
    points: list[tuple[Fraction, ...]]
    affine_dim: int
    coords: list[int]
    scale: int
    vertices: list[int]
    facets: list[tuple[tuple[int, ...], int]] = field(default_factory=list)
    volume: Fraction = Fraction(0)
    method: str = ""

    @property
    def vertex_points(self) -> list[tuple[Fraction, ...]]:
        return [self.points[i] for i in self.vertices]

    @property
    def full_dimensional(self) -> bool:
        return self.affine_dim == self.dim

    def halfspaces(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        """Facet inequalities ``a.x <= b`` in ambient coordinates (full-dimensional hulls)."""
        if not self.full_dimensional:
            raise ValueError("halfspace form is only provided for full-dimensional hulls")
        return [(tuple(Fraction(v) for v in a), Fraction(b, self.scale)) for a, b in self.facets]

    def is_coordinate_parallel(self) -> bool:
        """True when the affine hull is a translate of the span of ``coords``."""
        if self.full_dimensional:
            return True
        other = [j for j in range(self.dim) if j not in self.coords]
        base = self.points[0]
        return all(p[j] == base[j] for p in self.points for j in other)


def convex_hull(points: Sequence[Sequence], allow_brute: bool = True) -> Hull:
    pts = sorted({tuple(Fraction(v) for v in p) for p in points})
    if not pts:
        raise ValueError("convex hull of an empty point set")
    dim = len(pts[0])
    ints, D = to_integer_points(pts)
    base = ints[0]
    diffs = [[p[j] - base[j] for j in range(dim)] for p in ints[1:]]
    k, coords = rank_and_pivots(diffs) if diffs else (0, [])
    Q = [tuple(p[j] for j in coords) for p in ints]

    hull = Hull(dim=dim, points=pts, affine_dim=k, coords=coords, scale=D, vertices=[])
    if k == 0:
        hull.vertices = [0]
        hull.volume = Fraction(1)
        hull.method = "point"
        return hull
    if k == 1:
        vals = [q[0] for q in Q]
        lo = min(range(len(Q)), key=lambda i: vals[i])
        hi = max(range(len(Q)), key=lambda i: vals[i])
        hull.vertices = sorted({lo, hi})
        hull.facets = [((-1,), -vals[lo]), ((1,), vals[hi])]
        hull.volume = Fraction(vals[hi] - vals[lo], D)
        hull.method = "interval"
        return hull

    for options in (None, "QJ"):
        result = _qhull_certified(Q, k, options)
        if result is not None:
            facets, incid, vol_int = result
            hull.method = "qhull" if options is None else "qhull-QJ"
            break
    else:
        if not allow_brute:
            raise HullError("qhull boundary could not be certified")
        facets, incid = _brute_facets(Q, k)
        vol_int = _brute_volume_int(Q, k)
        hull.method = "brute"

    hull.facets = facets
    hull.vertices = _vertices_from_incidence(facets, incid, len(Q), k)
    hull.volume = Fraction(vol_int, math.factorial(k) * D ** k) if hull.method != "brute" \
        else vol_int / D ** k
    return hull


def _filtered_sides(Xf, A_int, b_int, Q):
    """Sign of ``a.x - b`` for every point and plane, certified.

    Returns (violated, on_plane) where ``on_plane[s]`` lists the point indices
    exactly on plane ``s``.
    """
    A_f = np.array(A_int, dtype=float)
    b_f = np.array(b_int, dtype=float)
    norm = np.maximum(np.abs(A_f).max(axis=1), 1.0)
    A_f /= norm[:, None]
    b_f /= norm
    vals = Xf @ A_f.T - b_f
    bound = 1e-9 * (np.abs(Xf) @ np.abs(A_f).T + np.abs(b_f)) + 1e-300
    if np.any(vals > bound):
        return True, None
    near = np.abs(vals) <= bound
    on_plane = []
    for s in range(len(A_int)):
        a, b = A_int[s], b_int[s]
        rows = np.nonzero(near[:, s])[0]
        hits = []
        for i in rows:
            v = sum(ai * xi for ai, xi in zip(a, Q[i])) - b
            if v > 0:
                return True, None
            if v == 0:
                hits.append(int(i))
        on_plane.append(hits)
    return False, on_plane


def _qhull_certified(Q, k, options):
    Xf = np.array(Q, dtype=float)
    try:
        qh = ConvexHull(Xf, qhull_options=options) if options else ConvexHull(Xf)
    except (QhullError, ValueError):
        return None
    simplices = [tuple(sorted(int(v) for v in s)) for s in qh.simplices]
    ridges = Counter()
    for s in simplices:
        for r in itertools.combinations(s, k - 1):
            ridges[r] += 1
    if any(c != 2 for c in ridges.values()):
        return None

    total = [sum(q[j] for q in Q) for j in range(k)]
    npts = len(Q)
    planes = {}
    for s in simplices:
        hp = hyperplane_through([Q[i] for i in s])
        if hp is None:
            continue  # flat simplex from triangulating a coplanar facet
        a, b = hp
        side = sum(ai * ti for ai, ti in zip(a, total)) - npts * b
        if side > 0:
            a, b = tuple(-ai for ai in a), -b
        elif side == 0:
            return None
        planes[(a, b)] = True
    plane_list = list(planes)
    if not plane_list:
        return None
    violated, on_plane = _filtered_sides(Xf, [p[0] for p in plane_list], [p[1] for p in plane_list], Q)
    if violated:
        return None
    # every boundary simplex must lie in one of the certified planes
    plane_sets = [set(h) for h in on_plane]
    for s in simplices:
        if not any(set(s) <= ps for ps in plane_sets):
            return None

    p0 = Q[0]
    vol = 0
    for s in simplices:
        if 0 in s:
            continue
        M = [[Q[i][j] - p0[j] for j in range(k)] for i in s]
        vol += abs(bareiss_det(M))
    approx = qh.volume if options is None else None
    if approx is not None:
        exact = vol / math.factorial(k)
        if abs(exact - approx) > 1e-7 * max(1.0, abs(approx)):
            return None
    return plane_list, on_plane, vol


def _brute_facets(Q, k):
    npts = len(Q)
    if math.comb(npts, k) > MAX_BRUTE_SUBSETS:
        raise HullError(f"brute-force facet enumeration over {npts} points in dimension {k} "
                        "exceeds the desk-scale limit")
    total = [sum(q[j] for q in Q) for j in range(k)]
    planes = {}
    for combo in itertools.combinations(range(npts), k):
        hp = hyperplane_through([Q[i] for i in combo])
        if hp is None:
            continue
        a, b = hp
        side = sum(ai * ti for ai, ti in zip(a, total)) - npts * b
        if side > 0:
            a, b = tuple(-ai for ai in a), -b
        if (a, b) in planes:
            continue
        vals = [sum(ai * xi for ai, xi in zip(a, q)) - b for q in Q]
        if all(v <= 0 for v in vals):
            planes[(a, b)] = [i for i, v in enumerate(vals) if v == 0]
    return list(planes), list(planes.values())


def _brute_volume_int(Q, k) -> Fraction:
    """Exact volume of conv(Q) for integer points spanning ``Z^k`` (recursive pyramids)."""
    if k == 1:
        vals = [q[0] for q in Q]
        return Fraction(max(vals) - min(vals))
    facets, incid = _brute_facets(Q, k)
    npts = len(Q)
    c = [Fraction(sum(q[j] for q in Q), npts) for j in range(k)]
    vol = Fraction(0)
    for (a, b), idx in zip(facets, incid):
        r = next(j for j in range(k) if a[j] != 0)
        sub = sorted({tuple(Q[i][j] for j in range(k) if j != r) for i in idx})
        height = b - sum(ai * ci for ai, ci in zip(a, c))
        vol += height * _brute_volume_int(sub, k - 1) / abs(a[r])
    return vol / k


def brute_volume(points: Sequence[Sequence]) -> Fraction:
    """Exact full-dimensional volume by exhaustive facet enumeration.

    Independent of Qhull; used as a fallback and as a test oracle.
    """
    pts = sorted({tuple(Fraction(v) for v in p) for p in points})
    dim = len(pts[0])
    ints, D = to_integer_points(pts)
    diffs = [[p[j] - ints[0][j] for j in range(dim)] for p in ints[1:]]
    k, _ = rank_and_pivots(diffs) if diffs else (0, [])
    if k < dim:
        return Fraction(0)
    return _brute_volume_int(ints, dim) / D ** dim


def _vertices_from_incidence(facets, incid, npts, k):
    by_point: dict[int, list[int]] = {}
    for f, idx in enumerate(incid):
        for i in idx:
            by_point.setdefault(i, []).append(f)
    verts = []
    for i, fs in sorted(by_point.items()):
        if len(fs) < k:
            continue
        r, _ = rank_and_pivots([facets[f][0] for f in fs])
        if r == k:
            verts.append(i)
    return verts
