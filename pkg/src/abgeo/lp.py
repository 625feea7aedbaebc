"""Dense two-phase simplex method over the rationals.

Every pivot is exact, and Bland's smallest-index rule prevents cycling, so
feasibility and optimality answers carry no tolerance.  Sized for the small
membership and pruning problems of this package (tens of rows, a few hundred
columns).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: list[Fraction] | None = None
    value: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def _pivot(T: list[list[Fraction]], row: int, col: int) -> None:
    prow = T[row]
    inv = ONE / prow[col]
    if inv != 1:
        T[row] = prow = [v * inv for v in prow]
    for r, line in enumerate(T):
        if r == row:
            continue
        f = line[col]
        if f:
            T[r] = [a - f * b if b else a for a, b in zip(line, prow)]


def _simplex(T, basis, obj_row, allowed):
    """Maximize the objective held in ``T[obj_row]`` (stored as ``-c``).

    Returns False when the problem is unbounded.
    """
    m = obj_row  # constraint rows are 0..m-1
    width = len(T[0]) - 1
    while True:
        obj = T[obj_row]
        col = next((j for j in range(width) if allowed[j] and obj[j] < 0), None)
        if col is None:
            return True
        best = None
        row = None
        for r in range(m):
            a = T[r][col]
            if a > 0:
                ratio = T[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[row]):
                    best, row = ratio, r
        if row is None:
            return False
        _pivot(T, row, col)
        basis[row] = col


def linprog_exact(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    maximize: bool = True,
    feasibility_only: bool = False,
) -> LPResult:
    """Solve ``max (or min) c.x  s.t.  A_ub x <= b_ub, A_eq x = b_eq, x >= 0``.

    All coefficients are converted to Fractions.  With ``feasibility_only``
    phase two is skipped and ``value`` is left unset.
    """
    nvar = len(c)
    rows: list[tuple[list[Fraction], Fraction, bool]] = []
    for a, b in zip(A_ub, b_ub):
        rows.append(([Fraction(v) for v in a], Fraction(b), True))
    for a, b in zip(A_eq, b_eq):
        rows.append(([Fraction(v) for v in a], Fraction(b), False))
    for a, _, _ in rows:
        if len(a) != nvar:
            raise ValueError("constraint width does not match objective length")

    n_slack = sum(1 for _, _, ub in rows if ub)
    m = len(rows)
    # columns: original | slacks | artificials | rhs
    n_art_max = m
    width = nvar + n_slack + n_art_max
    T: list[list[Fraction]] = []
    basis: list[int] = []
    s_idx = nvar
    a_idx = nvar + n_slack
    art_cols = []
    for a, b, ub in rows:
        line = a + [ZERO] * (n_slack + n_art_max) + [b]
        if ub:
            line[s_idx] = ONE
            slack_col = s_idx
            s_idx += 1
        else:
            slack_col = None
        if b < 0:
            line = [-v for v in line]
        if slack_col is not None and line[slack_col] == 1:
            basis.append(slack_col)
        else:
            line[a_idx] = ONE
            basis.append(a_idx)
            art_cols.append(a_idx)
            a_idx += 1
        T.append(line)

    is_art = [False] * width
    for j in art_cols:
        is_art[j] = True

    if art_cols:
        # Phase one: maximize -(sum of artificials).
        obj = [ZERO] * (width + 1)
        for j in art_cols:
            obj[j] = ONE
        for r, bc in enumerate(basis):
            if is_art[bc]:
                obj = [o - v for o, v in zip(obj, T[r])]
        T.append(obj)
        _simplex(T, basis, m, [True] * width)
        if T[m][-1] != 0:
            return LPResult("infeasible")
        # Drive remaining (zero-level) artificials out of the basis.
        for r in range(m):
            if is_art[basis[r]]:
                col = next((j for j in range(nvar + n_slack) if T[r][j] != 0), None)
                if col is not None:
                    _pivot(T, r, col)
                    basis[r] = col
        T.pop()
        keep = [r for r in range(m) if not is_art[basis[r]]]
        T = [T[r] for r in keep]
        basis = [basis[r] for r in keep]
        m = len(T)

    allowed = [not is_art[j] for j in range(width)]
    if feasibility_only:
        return LPResult("optimal", _extract(T, basis, nvar), None)

    sign = ONE if maximize else -ONE
    obj = [ZERO] * (width + 1)
    for j in range(nvar):
        obj[j] = -sign * Fraction(c[j])
    for r, bc in enumerate(basis):
        f = obj[bc]
        if f:
            obj = [o - f * v for o, v in zip(obj, T[r])]
    T.append(obj)
    if not _simplex(T, basis, m, allowed):
        return LPResult("unbounded")
    x = _extract(T, basis, nvar)
    value = sum((Fraction(cj) * xj for cj, xj in zip(c, x)), ZERO)
    return LPResult("optimal", x, value)


def _extract(T, basis, nvar):
    x = [ZERO] * nvar
    for r, bc in enumerate(basis):
        if bc < nvar:
            x[bc] = T[r][-1]
    return x


def convex_combination_feasible(points: Sequence[Sequence[Fraction]], target: Sequence[Fraction],
                                dominate: bool = False) -> bool:
    """Is ``target`` a convex combination of ``points`` (or dominated by one)?

    With ``dominate`` the question is whether some convex combination is
    coordinatewise ``>= target``, i.e. membership in the down-closure.
    """
    k = len(points)
    if k == 0:
        return False
    dim = len(target)
    cols = [[Fraction(p[i]) for p in points] for i in range(dim)]
    if dominate:
        a_ub = [[-v for v in col] for col in cols]
        b_ub = [-Fraction(t) for t in target]
        res = linprog_exact([0] * k, A_ub=a_ub, b_ub=b_ub, A_eq=[[1] * k], b_eq=[1],
                            feasibility_only=True)
    else:
        res = linprog_exact([0] * k, A_eq=cols + [[1] * k], b_eq=list(target) + [1],
                            feasibility_only=True)
    return res.feasible


def _rationalize(v: float, den: int = 1 << 20) -> Fraction:
    return Fraction(v).limit_denominator(den)


def dominated_certified(points: Sequence[Sequence[Fraction]], target: Sequence[Fraction]) -> bool:
    """Down-closure membership: a float LP proposes, exact arithmetic certifies.

    A separating weight vector proves non-membership and a convex combination
    proves membership; if neither certificate survives rounding, the exact
    simplex decides.
    """
    k, d = len(points), len(target)
    if k == 0:
        return False
    P = np.array([[float(v) for v in p] for p in points])
    g = np.array([float(v) for v in target])
    # separation: max w.g - mu  s.t.  P w <= mu, sum w = 1, w >= 0
    sep = linprog(np.concatenate([-g, [1.0]]), A_ub=np.hstack([P, -np.ones((k, 1))]), b_ub=np.zeros(k),
                  A_eq=[[1.0] * d + [0.0]], b_eq=[1.0], bounds=[(0, None)] * d + [(None, None)],
                  method="highs")
    if sep.status == 0:
        if -sep.fun > 1e-12:
            w = [max(_rationalize(x), ZERO) for x in sep.x[:d]]
            wg = sum((a * b for a, b in zip(w, target)), ZERO)
            if any(w) and all(sum((a * b for a, b in zip(w, p)), ZERO) < wg for p in points):
                return False
        else:
            prim = linprog(np.zeros(k), A_ub=-P.T, b_ub=-g, A_eq=np.ones((1, k)), b_eq=[1.0],
                           bounds=[(0, None)] * k, method="highs")
            if prim.status == 0:
                lam = [max(_rationalize(x), ZERO) for x in prim.x]
                s = sum(lam, ZERO)
                if s:
                    lam = [x / s for x in lam]
                    if all(sum((l * p[j] for l, p in zip(lam, points)), ZERO) >= target[j] for j in range(d)):
                        return True
                support = [p for p, x in zip(points, prim.x) if x > 1e-9]
                if len(support) < k and convex_combination_feasible(support, target, dominate=True):
                    return True
    return convex_combination_feasible(points, target, dominate=True)
