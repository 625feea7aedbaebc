"""Sharpness probes: evaluate the extremal witness families at ``t = 2^-k``.

The witnesses are degenerate (``eps = 0``): ``A = tK`` with ``K`` the positive
part of a Hanner polytope, and unit cubes on complementary coordinate blocks.
As ``t -> 0`` the inequality ratio climbs to the sharp constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..bodies import AntiBlockingBody, CoordSubspace, all_subspaces, hanner_pos, make_antiblocking, minkowski_sum, project, subcube
from ..constants import b_const, nu_const, r_const, zeta
from ..numerics import LpKind, LpParam, lp_weight
from ..volume import exact_volume, lp_diff_volume, projection_volume

PROBE_STEPS = 9  # t = 2^0 .. 2^-8


@dataclass(frozen=True)
class ProbeResult:
    constant_id: str
    params: dict
    constant: Fraction | float
    ratios: tuple  # (t, ratio) pairs

    @property
    def final_fraction(self) -> float:
        return float(self.ratios[-1][1]) / float(self.constant)

    @property
    def nondecreasing(self) -> bool:
        vals = [r for _, r in self.ratios]
        return all(b >= a for a, b in zip(vals, vals[1:]))

    def to_dict(self) -> dict:
        def fmt(x):
            return str(x) if isinstance(x, Fraction) else float(x)
        return {"constant_id": self.constant_id, "params": self.params, "constant": fmt(self.constant),
                "ratios": [[fmt(t), fmt(r)] for t, r in self.ratios],
                "nondecreasing": self.nondecreasing, "final_fraction": self.final_fraction}


def _span(n, idx) -> CoordSubspace:
    return CoordSubspace.spanned_by(n, idx)


def _pair_sum_projection(B: AntiBlockingBody, C: AntiBlockingBody, G: CoordSubspace, p: LpParam):
    """``|P_G (B (+)_p C)|`` for cubes ``B, C`` on disjoint coordinate blocks."""
    if G.size == 0:
        return Fraction(1)
    PB, PC = project(B, G), project(C, G)
    if p.kind is LpKind.ONE:
        return exact_volume(minkowski_sum(PB, PC))
    if p.kind is LpKind.INF:
        return exact_volume(make_antiblocking(G.size, PB.generators + PC.generators))
    # a coordinate reflection fixing B maps -C onto C
    return lp_diff_volume(PB, PC, p)


def triple_volume(A: AntiBlockingBody, B: AntiBlockingBody, C: AntiBlockingBody, p: LpParam):
    """``|A (+)_p -B (+)_p -C|`` by the subspace decomposition of ``A`` against ``B (+)_p C``."""
    n = A.dim
    total = Fraction(0)
    for G in all_subspaces(n):
        total = total + lp_weight(n, G.size, p) * projection_volume(A, G) * _pair_sum_projection(B, C, G.complement(), p)
    return total


def _ts():
    return [Fraction(1, 2 ** k) for k in range(PROBE_STEPS)]


def ratio_probe(n: int, i: int, p: LpParam, j: int | None = None, cid: str = "nu") -> ProbeResult:
    """Witness for the projection-ratio inequality (``r`` at ``p = 1``, ``nu`` in general)."""
    const = nu_const(n, p, i) if cid == "nu" else r_const(n, i)
    if j is None:
        j = const.argmax[0]
    if not n - i <= j <= n:
        raise ValueError("need n - i <= j <= n")
    E = _span(n, range(i))
    sigma = set(range(i, n)) | set(range(n - j))
    K = hanner_pos(n, sigma)
    B = subcube(_span(n, range(n - j)))
    PB = project(B, E)
    out = []
    for t in _ts():
        A = K.scale(t)
        PA = project(A, E)
        vb = exact_volume(B)
        lhs = exact_volume(A) / exact_volume(PA) + (vb / exact_volume(PB) if vb else 0)
        ratio = lhs * lp_diff_volume(PA, PB, p) / lp_diff_volume(A, B, p)
        out.append((t, ratio))
    return ProbeResult(cid, {"n": n, "i": i, "j": j, "p": p.label()}, const.value, tuple(out))


def plunnecke_probe(n: int, p: LpParam, i: int | None = None, j: int | None = None,
                    cid: str = "b") -> ProbeResult:
    """Witness for the three-body inequality (``zeta_{n,2}`` at ``p = 1``, ``b(n,p)`` in general)."""
    const = b_const(n, p) if cid == "b" else zeta(n, 2)
    if i is None or j is None:
        i, j = const.argmax
    if i + j < n:
        raise ValueError("need i + j >= n")
    B = subcube(_span(n, range(i, n)))
    C = subcube(_span(n, range(n - j)))
    K = hanner_pos(n, set(range(i, n)) | set(range(n - j)))
    out = []
    for t in _ts():
        A = K.scale(t)
        lhs = exact_volume(A) * triple_volume(A, B, C, p)
        rhs = lp_diff_volume(A, B, p) * lp_diff_volume(A, C, p)
        out.append((t, lhs / rhs))
    return ProbeResult(cid, {"n": n, "i": i, "j": j, "p": p.label()}, const.value, tuple(out))


def sharpness_probe(constant_id: str, n: int, i: int | None = None, j: int | None = None,
                    p: LpParam | None = None) -> ProbeResult:
    if constant_id == "zeta":
        return plunnecke_probe(n, LpParam(LpKind.ONE), i, j, cid="zeta")
    if constant_id == "b":
        return plunnecke_probe(n, p or LpParam(LpKind.ONE), i, j)
    if constant_id == "r":
        return ratio_probe(n, i if i is not None else n - 1, LpParam(LpKind.ONE), j, cid="r")
    if constant_id == "nu":
        return ratio_probe(n, i if i is not None else n - 1, p or LpParam(LpKind.ONE), j)
    raise KeyError(f"no probe for constant {constant_id!r}")
