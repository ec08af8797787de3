"""Closed curvature-bounded loops assembled from arcs and segments.

A Loop is a closed, C1, simple chain of Segment and Arc pieces traversed
clockwise (total turning -2*pi), parametrized by arc length from the start
of its first piece.  Every arc radius is at least 1/kappa.  Validation
happens in the constructor; a constructed Loop is always usable.
"""
from __future__ import annotations

import bisect
import math
from typing import Optional, Sequence

import numpy as np

from .config import ANGLE_TOL, CURVATURE_SCALE, Tolerances, default_tolerances
from .errors import (
    CurvatureExceeded,
    DegenerateInterval,
    NotC1,
    NotClosed,
    SelfIntersecting,
    TooShort,
    WrongOrientation,
)
from .geometry import (
    TWO_PI,
    Arc,
    Piece,
    Point,
    Segment,
    closest_on_piece,
    piece_piece_min_distance,
    pieces_bbox,
    winding_number,
    wrap_angle,
)


def _same_circle(a: Arc, b: Arc, eps: float) -> bool:
    return (a.center.distance(b.center) <= eps
            and abs(a.radius - b.radius) <= eps)


class Loop:
    """Validated closed clockwise chain with curvature bound kappa."""

    def __init__(self, pieces: Sequence[Piece], kappa: float,
                 tol: Optional[Tolerances] = None, auto_reverse: bool = False,
                 metadata: Optional[dict] = None):
        if kappa <= 0.0:
            raise ValueError(f"kappa must be positive, got {kappa!r}")
        pieces = tuple(pieces)
        if not pieces:
            raise NotClosed("loop needs at least one piece")
        self.kappa = kappa
        self.radius = 1.0 / kappa
        lengths = [p.length for p in pieces]
        total = sum(lengths)
        self.tol = tol if tol is not None else default_tolerances(self.radius, total)
        eps = self.tol.eps_geom

        for i, p in enumerate(pieces):
            if p.length <= eps:
                raise DegenerateInterval(f"piece {i} has near-zero length {p.length!r}")

        self._check_closure(pieces, eps)
        self._check_c1(pieces)
        self._check_curvature(pieces)
        pieces = self._orient(pieces, auto_reverse)
        self._check_simple(pieces, eps)

        self.pieces = pieces
        self.length = total
        if total < TWO_PI * self.radius - self.tol.eps_param:
            raise TooShort(
                f"loop length {total!r} is below the 2*pi*r minimum "
                f"{TWO_PI * self.radius!r}")
        cums = [0.0]
        for p in pieces:
            cums.append(cums[-1] + p.length)
        self._cum = cums
        self._cum_arr = np.asarray(cums)
        self.metadata = dict(metadata or {})

    # -- validation steps ---------------------------------------------------

    @staticmethod
    def _check_closure(pieces, eps):
        for i, p in enumerate(pieces):
            q = pieces[(i + 1) % len(pieces)]
            gap = p.end_point.distance(q.start_point)
            if gap > eps:
                raise NotClosed(
                    f"gap {gap!r} between piece {i} and piece "
                    f"{(i + 1) % len(pieces)}")

    @staticmethod
    def _check_c1(pieces):
        for i, p in enumerate(pieces):
            q = pieces[(i + 1) % len(pieces)]
            a = p.tangent_at(p.length)
            b = q.tangent_at(0.0)
            ang = abs(wrap_angle(b.angle() - a.angle()))
            if ang > ANGLE_TOL:
                raise NotC1(
                    f"tangent break of {ang!r} rad at junction {i} "
                    f"({p.end_point.x!r}, {p.end_point.y!r})")

    def _check_curvature(self, pieces):
        limit = self.kappa * (1.0 + CURVATURE_SCALE)
        for i, p in enumerate(pieces):
            if abs(p.signed_curvature) > limit:
                raise CurvatureExceeded(
                    f"piece {i} has curvature {p.signed_curvature!r}, "
                    f"bound is {self.kappa!r}")

    def _orient(self, pieces, auto_reverse):
        turning = sum(p.sweep for p in pieces if isinstance(p, Arc))
        if abs(turning + TWO_PI) <= 1e-6:
            return pieces
        if abs(turning - TWO_PI) <= 1e-6:
            if auto_reverse:
                return tuple(p.reversed_() for p in reversed(pieces))
            raise WrongOrientation(
                "total turning is +2*pi; the loop runs counterclockwise "
                "(pass auto_reverse=True to flip it)")
        raise SelfIntersecting(
            f"total turning {turning!r} is not -2*pi; the chain cannot "
            f"bound a simple region")

    def _check_simple(self, pieces, eps):
        n = len(pieces)
        for i in range(n):
            for j in range(i + 1, n):
                adjacent = (j == i + 1) or (i == 0 and j == n - 1)
                a, b = pieces[i], pieces[j]
                if adjacent:
                    # C1 tangency at the junction means distinct underlying
                    # circles/lines cannot meet again; only arcs on the same
                    # circle can overlap, when their spans exceed a turn
                    if (isinstance(a, Arc) and isinstance(b, Arc)
                            and _same_circle(a, b, eps)):
                        if abs(a.sweep) + abs(b.sweep) > TWO_PI + 1e-9:
                            raise SelfIntersecting(
                                f"pieces {i} and {j} overlap on one circle")
                    continue
                dist, sa, sb = piece_piece_min_distance(a, b)
                if dist <= eps:
                    w = a.point_at(sa)
                    raise SelfIntersecting(
                        f"pieces {i} and {j} meet near ({w.x!r}, {w.y!r})")

    # -- parametrization ----------------------------------------------------

    def wrap(self, t: float) -> float:
        r = math.fmod(t, self.length)
        return r + self.length if r < 0.0 else r

    def forward(self, t1: float, t2: float) -> float:
        """Arc length traveled going forward from t1 to t2 (in [0, L))."""
        return self.wrap(t2 - t1)

    def cyclic_gap(self, t1: float, t2: float) -> float:
        d = self.forward(t1, t2)
        return min(d, self.length - d)

    def locate(self, t: float) -> tuple:
        """(piece index, offset) with the half-open convention [start, end)."""
        t = self.wrap(t)
        i = bisect.bisect_right(self._cum, t) - 1
        if i >= len(self.pieces):
            i = len(self.pieces) - 1
        return i, t - self._cum[i]

    def point_at(self, t: float) -> Point:
        i, s = self.locate(t)
        return self.pieces[i].point_at(s)

    def tangent_at(self, t: float) -> Point:
        i, s = self.locate(t)
        return self.pieces[i].tangent_at(s)

    def inward_normal_at(self, t: float) -> Point:
        return self.tangent_at(t).rot_cw()

    def curvature_at(self, t: float) -> float:
        i, _s = self.locate(t)
        return self.pieces[i].signed_curvature

    def junction_params(self) -> list:
        return list(self._cum[:-1])

    def subcurve(self, t1: float, t2: float) -> list:
        """Trimmed pieces covering the forward sub-curve from t1 to t2.

        The interval is cyclic: when t2 wraps past the start the walk
        continues through it.  Raises DegenerateInterval when the forward
        gap collapses below eps_param.
        """
        d = self.forward(t1, t2)
        if d <= self.tol.eps_param:
            raise DegenerateInterval(
                f"subcurve from {t1!r} to {t2!r} has near-zero extent")
        i, s = self.locate(t1)
        out = []
        remaining = d
        tiny = 1e-15 * self.length
        while remaining > tiny:
            piece = self.pieces[i]
            take = min(piece.length - s, remaining)
            if take > tiny:
                out.append(piece.trim(s, s + take))
            remaining -= take
            i = (i + 1) % len(self.pieces)
            s = 0.0
        return out

    # -- geometric queries ---------------------------------------------------

    def bbox(self) -> tuple:
        return pieces_bbox(self.pieces)

    def min_distance(self, p: Point) -> float:
        return min(closest_on_piece(p, piece)[0] for piece in self.pieces)

    def closest_param(self, p: Point) -> tuple:
        """(distance, loop parameter) of the closest boundary point."""
        best = (math.inf, 0.0)
        for i, piece in enumerate(self.pieces):
            d, s = closest_on_piece(p, piece)
            if d < best[0]:
                best = (d, self._cum[i] + s)
        return best

    def winding(self, p: Point, check: bool = True) -> int:
        return winding_number(p, self.pieces, self.tol.eps_geom, check=check)

    def side_of(self, p: Point) -> str:
        """'interior', 'exterior', or 'boundary' (within eps_geom)."""
        if self.min_distance(p) <= self.tol.eps_geom:
            return "boundary"
        return "interior" if self.winding(p, check=False) == -1 else "exterior"

    def contains(self, p: Point) -> bool:
        """Closed containment: interior or boundary."""
        return self.side_of(p) != "exterior"

    def is_convex(self) -> bool:
        tol = self.kappa * CURVATURE_SCALE
        return all(p.signed_curvature <= tol for p in self.pieces)

    def signed_area(self) -> float:
        """Green's-theorem area; negative for these clockwise loops."""
        total = 0.0
        for p in self.pieces:
            if isinstance(p, Segment):
                total += 0.5 * p.start.cross(p.end)
            else:
                a0 = p.start_angle
                a1 = p.end_angle
                r = p.radius
                o = p.center
                total += 0.5 * (r * r * p.sweep
                                + r * (o.x * (math.sin(a1) - math.sin(a0))
                                       - o.y * (math.cos(a1) - math.cos(a0))))
        return total

    # -- batched evaluation ---------------------------------------------------

    def points_at(self, ts: np.ndarray) -> np.ndarray:
        return self._eval(ts, want_tangent=False)

    def tangents_at(self, ts: np.ndarray) -> np.ndarray:
        return self._eval(ts, want_tangent=True)

    def _eval(self, ts: np.ndarray, want_tangent: bool) -> np.ndarray:
        ts = np.mod(np.asarray(ts, dtype=float), self.length)
        idx = np.searchsorted(self._cum_arr[1:], ts, side="right")
        idx = np.minimum(idx, len(self.pieces) - 1)
        out = np.empty((len(ts), 2))
        for i in np.unique(idx):
            mask = idx == i
            s = ts[mask] - self._cum[i]
            piece = self.pieces[i]
            if isinstance(piece, Segment):
                d = piece.direction
                if want_tangent:
                    out[mask, 0] = d.x
                    out[mask, 1] = d.y
                else:
                    out[mask, 0] = piece.start.x + d.x * s
                    out[mask, 1] = piece.start.y + d.y * s
            else:
                a = piece.start_angle + piece.sweep_sign * s / piece.radius
                if want_tangent:
                    g = piece.sweep_sign
                    out[mask, 0] = -np.sin(a) * g
                    out[mask, 1] = np.cos(a) * g
                else:
                    out[mask, 0] = piece.center.x + piece.radius * np.cos(a)
                    out[mask, 1] = piece.center.y + piece.radius * np.sin(a)
        return out
