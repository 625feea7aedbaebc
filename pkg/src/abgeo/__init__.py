"""Exact and Monte Carlo volume inequalities for anti-blocking bodies."""

from .bodies import (AntiBlockingBody, CoordSubspace, VPolytope, box, hanner_pos, make_antiblocking,
                     make_vpolytope, simplex)
from .numerics import LpParam
from .report import CheckReport
from .volume import VolumeEstimate, diff_volume_decomp, exact_volume, lp_diff_volume

__version__ = "0.1.0"

__all__ = ["AntiBlockingBody", "CoordSubspace", "VPolytope", "box", "hanner_pos", "make_antiblocking",
           "make_vpolytope", "simplex", "LpParam", "CheckReport", "VolumeEstimate", "diff_volume_decomp",
           "exact_volume", "lp_diff_volume"]
