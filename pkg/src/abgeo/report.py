"""Check reports shared by every verification routine."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

SIGMA_BAND = 3.0
NUMERIC_RTOL = 1e-9


@dataclass
class CheckReport:
    """Outcome of one inequality (``relation="<="``) or identity (``"=="``) check.

    ``method`` is ``exact`` (rational comparison), ``numeric`` (deterministic
    floating formula, compared to relative 1e-9) or ``mc`` (pass iff
    ``lhs <= rhs + 3 * combined stderr``).
    """

    theorem_id: str
    instance: dict[str, Any]
    lhs: Fraction | float
    rhs: Fraction | float
    constant: Fraction | float
    method: str
    lhs_stderr: float = 0.0
    rhs_stderr: float = 0.0
    relation: str = "<="
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in ("exact", "numeric", "mc"):
            raise ValueError(f"unknown check method {self.method!r}")
        if self.method == "exact" and (self.lhs_stderr or self.rhs_stderr):
            raise ValueError("exact checks carry no standard error")

    @property
    def stderr(self) -> float:
        return math.hypot(self.lhs_stderr, self.rhs_stderr)

    @property
    def margin(self) -> Fraction | float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        lhs, rhs = self.lhs, self.rhs
        if self.method == "exact":
            return lhs == rhs if self.relation == "==" else lhs <= rhs
        if self.method == "numeric":
            tol = NUMERIC_RTOL * max(abs(float(lhs)), abs(float(rhs)), 1e-300)
            if self.relation == "==":
                return abs(float(lhs) - float(rhs)) <= tol
            return float(lhs) <= float(rhs) + tol
        band = SIGMA_BAND * self.stderr
        if self.relation == "==":
            return abs(float(lhs) - float(rhs)) <= band
        return float(lhs) <= float(rhs) + band

    def to_dict(self) -> dict[str, Any]:
        return {
            "theorem_id": self.theorem_id,
            "instance": _jsonable(self.instance),
            "lhs": _jsonable(self.lhs),
            "lhs_stderr": _jsonable(self.lhs_stderr),
            "rhs": _jsonable(self.rhs),
            "rhs_stderr": _jsonable(self.rhs_stderr),
            "constant": _jsonable(self.constant),
            "margin": _jsonable(self.margin),
            "relation": self.relation,
            "method": self.method,
            "pass": self.passed,
            "details": _jsonable(self.details),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return repr(x) if not math.isfinite(x) else float(repr(x))
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):
        return _jsonable(x.item())
    return str(x)
