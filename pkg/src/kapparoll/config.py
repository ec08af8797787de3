"""Tolerance bundle shared by every analysis routine.

All comparisons in the package are closed-set comparisons: distances and
parameters match when they agree within eps_geom / eps_param.  The defaults
scale with the disk radius and loop length so analyses are invariant under
similarity transforms.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

GEOM_SCALE = 1e-9          # eps_geom = GEOM_SCALE * r
PARAM_SCALE = 1e-9         # eps_param = PARAM_SCALE * L
ANGLE_TOL = 1e-7           # radians; C1 junction check
CURVATURE_SCALE = 1e-9     # curvature slack = kappa * CURVATURE_SCALE

THREADS_ENV = "KAPPA_ROLL_THREADS"


@dataclass(frozen=True)
class Tolerances:
    eps_geom: float
    eps_param: float
    angle_tol: float = ANGLE_TOL

    def scaled(self, factor: float) -> "Tolerances":
        return Tolerances(self.eps_geom * factor, self.eps_param * factor, self.angle_tol)


def default_tolerances(radius: float, length: float) -> Tolerances:
    return Tolerances(eps_geom=GEOM_SCALE * radius, eps_param=PARAM_SCALE * length)


def worker_count() -> int:
    """Worker cap from the KAPPA_ROLL_THREADS environment variable (>=1)."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
