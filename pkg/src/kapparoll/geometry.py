"""Planar primitives: points, segments, circular arcs, and predicates on them.

Conventions used throughout the package:

- Angles are radians, counterclockwise positive, y axis up.
- Curve pieces are parametrized by arc length from their start point.
- The signed curvature of an arc is sign(sweep) / radius; a segment has
  curvature zero.  A loop traversed clockwise therefore has total turning
  -2*pi and its convex arcs have negative curvature.
- For a clockwise loop the inward normal is the tangent rotated by -90
  degrees: (x, y) -> (y, -x).
- Containment predicates are closed: points within the tolerance of the
  boundary count as inside.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import ChordTooLong, DegenerateChord, PointOnCurve, SearchFailed

TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Wrap to the half-open interval (-pi, pi]."""
    r = math.fmod(a, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    elif r > math.pi:
        r -= TWO_PI
    return r


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> "Point":
        return Point(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, other: "Point") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point") -> float:
        return self.x * other.y - self.y * other.x

    @property
    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def unit(self) -> "Point":
        n = self.norm
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return Point(self.x / n, self.y / n)

    def rot_cw(self) -> "Point":
        """Rotate by -90 degrees (tangent -> inward normal on a clockwise loop)."""
        return Point(self.y, -self.x)

    def rot_ccw(self) -> "Point":
        return Point(-self.y, self.x)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)

    def distance(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self) -> tuple:
        return (self.x, self.y)


def from_angle(a: float) -> Point:
    return Point(math.cos(a), math.sin(a))


@dataclass(frozen=True)
class Disk:
    center: Point
    radius: float

    def contains(self, p: Point, eps: float = 0.0) -> bool:
        return self.center.distance(p) <= self.radius + eps


@dataclass(frozen=True)
class Lens:
    """Intersection of two equal-radius disks through the chord points p, q.

    When the chord spans a full diameter the two disks coincide.
    """

    d1: Disk
    d2: Disk
    p: Point
    q: Point

    @property
    def radius(self) -> float:
        return self.d1.radius

    def contains(self, x: Point, eps: float = 0.0) -> bool:
        return self.d1.contains(x, eps) and self.d2.contains(x, eps)


# ---------------------------------------------------------------------------
# pieces


@dataclass(frozen=True)
class Segment:
    start: Point
    end: Point

    @cached_property
    def length(self) -> float:
        return self.start.distance(self.end)

    @cached_property
    def direction(self) -> Point:
        return (self.end - self.start).unit()

    @property
    def signed_curvature(self) -> float:
        return 0.0

    def point_at(self, s: float) -> Point:
        return self.start + self.direction * s

    def tangent_at(self, s: float) -> Point:
        return self.direction

    def trim(self, s0: float, s1: float) -> "Segment":
        return Segment(self.point_at(s0), self.point_at(s1))

    def reversed_(self) -> "Segment":
        return Segment(self.end, self.start)

    @property
    def start_point(self) -> Point:
        return self.start

    @property
    def end_point(self) -> Point:
        return self.end


@dataclass(frozen=True)
class Arc:
    """Circular arc from angle start_angle through signed sweep.

    sweep > 0 runs counterclockwise, sweep < 0 clockwise.  |sweep| may be
    up to 2*pi (a full circle).
    """

    center: Point
    radius: float
    start_angle: float
    sweep: float

    @cached_property
    def length(self) -> float:
        return abs(self.sweep) * self.radius

    @property
    def signed_curvature(self) -> float:
        return math.copysign(1.0, self.sweep) / self.radius

    @property
    def sweep_sign(self) -> float:
        return 1.0 if self.sweep >= 0 else -1.0

    def angle_at(self, s: float) -> float:
        return self.start_angle + self.sweep_sign * s / self.radius

    def point_at(self, s: float) -> Point:
        a = self.angle_at(s)
        return self.center + Point(math.cos(a), math.sin(a)) * self.radius

    def tangent_at(self, s: float) -> Point:
        a = self.angle_at(s)
        g = self.sweep_sign
        return Point(-math.sin(a) * g, math.cos(a) * g)

    def trim(self, s0: float, s1: float) -> "Arc":
        return Arc(self.center, self.radius, self.angle_at(s0),
                   self.sweep * (s1 - s0) / self.length)

    def reversed_(self) -> "Arc":
        return Arc(self.center, self.radius, self.angle_at(self.length), -self.sweep)

    @property
    def end_angle(self) -> float:
        return self.start_angle + self.sweep

    @property
    def start_point(self) -> Point:
        return self.point_at(0.0)

    @property
    def end_point(self) -> Point:
        a = self.end_angle
        return self.center + Point(math.cos(a), math.sin(a)) * self.radius


Piece = Union[Segment, Arc]

_SPAN_TOL = 1e-9


def arc_offset_of_angle(arc: Arc, phi: float, tol: float = _SPAN_TOL) -> Optional[float]:
    """Arc-length position at which the arc passes polar angle phi, or None.

    The angular edge tolerance tol admits hits just past either endpoint,
    clamped back into range.
    """
    u = (arc.sweep_sign * (phi - arc.start_angle)) % TWO_PI
    span = abs(arc.sweep)
    if u <= span:
        return u * arc.radius
    if u <= span + tol:
        return span * arc.radius
    if TWO_PI - u <= tol:
        return 0.0
    return None


# ---------------------------------------------------------------------------
# distances


def closest_on_piece(p: Point, piece: Piece) -> tuple:
    """Minimum distance from p to the piece, with its arc-length position."""
    if isinstance(piece, Segment):
        v = piece.end - piece.start
        ll = v.dot(v)
        if ll == 0.0:
            return (piece.start.distance(p), 0.0)
        t = min(max((p - piece.start).dot(v) / ll, 0.0), 1.0)
        s = t * piece.length
        return (piece.point_at(s).distance(p), s)
    rel = p - piece.center
    d = rel.norm
    best = None
    if d > 1e-300:
        s_in = arc_offset_of_angle(piece, rel.angle())
        if s_in is not None:
            best = (abs(d - piece.radius), s_in)
    for s in (0.0, piece.length):
        cand = (piece.point_at(s).distance(p), s)
        if best is None or cand[0] < best[0]:
            best = cand
    return best


def farthest_on_piece(p: Point, piece: Piece) -> tuple:
    """Maximum distance from p to the piece, with its arc-length position."""
    if isinstance(piece, Segment):
        a = (piece.start.distance(p), 0.0)
        b = (piece.end.distance(p), piece.length)
        return a if a[0] >= b[0] else b
    rel = p - piece.center
    best = None
    if rel.norm > 1e-300:
        s_far = arc_offset_of_angle(piece, rel.angle() + math.pi)
        if s_far is not None:
            best = (rel.norm + piece.radius, s_far)
    for s in (0.0, piece.length):
        cand = (piece.point_at(s).distance(p), s)
        if best is None or cand[0] > best[0]:
            best = cand
    return best


def piece_extreme_along(piece: Piece, v: Point) -> tuple:
    """Maximum of <point, v> over the piece, with its arc-length position."""
    if isinstance(piece, Segment):
        a = (piece.start.dot(v), 0.0)
        b = (piece.end.dot(v), piece.length)
        return a if a[0] >= b[0] else b
    best = None
    s_top = arc_offset_of_angle(piece, v.angle())
    if s_top is not None:
        best = (piece.point_at(s_top).dot(v), s_top)
    for s in (0.0, piece.length):
        cand = (piece.point_at(s).dot(v), s)
        if best is None or cand[0] > best[0]:
            best = cand
    return best


def piece_piece_min_distance(a: Piece, b: Piece) -> tuple:
    """Minimum distance between two pieces as (dist, s_on_a, s_on_b).

    Candidate positions on a are its endpoints plus the interior points
    where the connecting line could be perpendicular to both pieces; each
    is resolved against b exactly.  Transversal crossings are caught by
    the intersection test.
    """
    cands_a = [0.0, a.length]
    if isinstance(a, Arc):
        if isinstance(b, Arc):
            rel = b.center - a.center
        else:
            fd, fs = closest_on_piece(a.center, b)
            rel = b.point_at(fs) - a.center
        if rel.norm > 1e-300:
            for phi in (rel.angle(), rel.angle() + math.pi):
                s = arc_offset_of_angle(a, phi)
                if s is not None:
                    cands_a.append(s)
    elif isinstance(b, Arc):
        dd, ss = closest_on_piece(b.center, a)
        cands_a.append(ss)

    best = None
    for sa in cands_a:
        p = a.point_at(sa)
        dist, sb = closest_on_piece(p, b)
        if best is None or dist < best[0]:
            best = (dist, sa, sb)
    # symmetric pass from b candidates
    for sb in (0.0, b.length):
        q = b.point_at(sb)
        dist, sa = closest_on_piece(q, a)
        if best is None or dist < best[0]:
            best = (dist, sa, sb)
    for sa, sb, _pt in piece_piece_intersections(a, b):
        return (0.0, sa, sb)
    return best


# ---------------------------------------------------------------------------
# intersections


def line_circle_ts(p: Point, d: Point, center: Point, radius: float) -> list:
    """Parameters t with |p + t*d - center| = radius; d must be unit length."""
    w = center - p
    tc = w.dot(d)
    h = d.cross(w)
    disc = radius * radius - h * h
    if disc < 0.0:
        return []
    dx = math.sqrt(disc)
    if dx == 0.0:
        return [tc]
    return [tc - dx, tc + dx]


def circle_segment_intersections(center: Point, radius: float,
                                 seg: Segment) -> list:
    """Arc-length positions on seg lying on the circle."""
    if seg.length == 0.0:
        return []
    out = []
    for t in line_circle_ts(seg.start, seg.direction, center, radius):
        if -_abs_tol(seg.length) <= t <= seg.length + _abs_tol(seg.length):
            out.append(min(max(t, 0.0), seg.length))
    return out


def _abs_tol(scale: float) -> float:
    return 1e-12 * max(scale, 1.0)


def circle_circle_points(c0: Point, r0: float, c1: Point, r1: float,
                         tol: float = 1e-12) -> list:
    """Intersection points of two circles (0, 1, or 2 of them)."""
    delta = c1 - c0
    d = delta.norm
    if d <= tol:
        return []
    if d > r0 + r1 + tol or d < abs(r0 - r1) - tol:
        return []
    u = delta * (1.0 / d)
    a = (d * d + r0 * r0 - r1 * r1) / (2.0 * d)
    h2 = r0 * r0 - a * a
    base = c0 + u * a
    if h2 <= tol * max(r0, r1):
        return [base]
    h = math.sqrt(h2)
    off = u.rot_ccw() * h
    return [base + off, base - off]


def piece_piece_intersections(a: Piece, b: Piece) -> list:
    """Transversal and touching intersections as (s_on_a, s_on_b, point).

    Collinear overlapping segments report the two overlap endpoints.
    """
    out = []
    if isinstance(a, Segment) and isinstance(b, Segment):
        va = a.end - a.start
        vb = b.end - b.start
        w = b.start - a.start
        denom = va.cross(vb)
        scale = max(a.length, b.length, 1.0)
        if abs(denom) <= 1e-14 * scale * scale:
            if abs(w.cross(va)) > 1e-12 * scale * scale:
                return []
            # collinear: project b endpoints onto a
            d = a.direction
            t0 = (b.start - a.start).dot(d)
            t1 = (b.end - a.start).dot(d)
            lo, hi = min(t0, t1), max(t0, t1)
            lo = max(lo, 0.0)
            hi = min(hi, a.length)
            if lo > hi:
                return []
            for sa in {lo, hi}:
                p = a.point_at(sa)
                _dist, sb = closest_on_piece(p, b)
                out.append((sa, sb, p))
            return out
        t = w.cross(vb) / denom
        u = w.cross(va) / denom
        tol = 1e-12
        if -tol <= t <= 1.0 + tol and -tol <= u <= 1.0 + tol:
            t = min(max(t, 0.0), 1.0)
            u = min(max(u, 0.0), 1.0)
            out.append((t * a.length, u * b.length, a.point_at(t * a.length)))
        return out
    if isinstance(a, Segment) and isinstance(b, Arc):
        swapped = [(sb, sa, p) for sa, sb, p in piece_piece_intersections(b, a)]
        return swapped
    if isinstance(a, Arc) and isinstance(b, Segment):
        for sb in circle_segment_intersections(a.center, a.radius, b):
            p = b.point_at(sb)
            sa = arc_offset_of_angle(a, (p - a.center).angle())
            if sa is not None:
                out.append((sa, sb, p))
        return out
    # arc-arc
    assert isinstance(a, Arc) and isinstance(b, Arc)
    for p in circle_circle_points(a.center, a.radius, b.center, b.radius):
        sa = arc_offset_of_angle(a, (p - a.center).angle())
        sb = arc_offset_of_angle(b, (p - b.center).angle())
        if sa is not None and sb is not None:
            out.append((sa, sb, p))
    return out


def circle_piece_intersections(center: Point, radius: float, piece: Piece,
                               angle_tol: float = 1e-6) -> list:
    """Circle/piece intersections as (s, point, kind), sorted by s.

    kind is "tangential" when the piece grazes the circle (its tangent
    there is within angle_tol of the circle's) and "transversal" when it
    crosses.  A graze split by roundoff into two nearby crossings merges
    into one tangential hit.  Cocircular arc overlaps produce no discrete
    hits; callers detect those by distance.
    """
    hits = []
    if isinstance(piece, Segment):
        positions = circle_segment_intersections(center, radius, piece)
    else:
        positions = []
        for p in circle_circle_points(center, radius, piece.center,
                                      piece.radius):
            s = arc_offset_of_angle(piece, (p - piece.center).angle())
            if s is not None:
                positions.append(s)
    for s in sorted(positions):
        p = piece.point_at(s)
        radial = (p - center) * (1.0 / radius)
        grazing = abs(radial.dot(piece.tangent_at(s))) <= angle_tol
        hits.append((s, p, "tangential" if grazing else "transversal"))
    merged = []
    merge_gap = max(2.5 * radius * angle_tol, 1e-9 * radius)
    for hit in hits:
        if (merged and merged[-1][2] == "tangential"
                and hit[2] == "tangential"
                and hit[0] - merged[-1][0] <= merge_gap):
            s = 0.5 * (merged[-1][0] + hit[0])
            merged[-1] = (s, piece.point_at(s), "tangential")
        else:
            merged.append(hit)
    return merged


# ---------------------------------------------------------------------------
# disks through two points


def disks_through(p: Point, q: Point, radius: float, eps: float) -> list:
    """Centers of radius-r disks whose boundary passes through p and q.

    Raises DegenerateChord when the points coincide within eps and
    ChordTooLong when they are farther apart than the diameter (plus eps).
    Returns one center when the chord equals the diameter, two otherwise;
    with two, the first center lies to the left of the p->q direction.
    """
    chord = p.distance(q)
    if chord <= eps:
        raise DegenerateChord(f"chord length {chord!r} below tolerance {eps!r}")
    if chord > 2.0 * radius + eps:
        raise ChordTooLong(
            f"chord length {chord!r} exceeds diameter {2.0 * radius!r}")
    mid = (p + q) * 0.5
    half = chord / 2.0
    h2 = radius * radius - half * half
    if h2 <= 0.0:
        return [mid]
    h = math.sqrt(h2)
    if h <= eps:
        return [mid]
    perp = (q - p).unit().rot_ccw()
    return [mid + perp * h, mid - perp * h]


# ---------------------------------------------------------------------------
# lens tests


def lens_of_chord(p: Point, q: Point, radius: float, eps: float) -> Lens:
    """Lens bounded by the radius-r circles through p and q."""
    centers = disks_through(p, q, radius, eps)
    d1 = Disk(centers[0], radius)
    d2 = Disk(centers[-1], radius)
    return Lens(d1, d2, p, q)


def lens_contains(lens: Lens, x: Point, eps: float = 0.0) -> bool:
    return lens.contains(x, eps)


def piece_lens_excess(piece: Piece, lens: Lens) -> tuple:
    """max over the piece of (max(d1, d2) - radius), with a witness position.

    Non-positive excess means the piece lies inside the (closed) lens.
    The maximum of the pointwise max splits into per-center maxima, so the
    evaluation is exact.
    """
    e1, s1 = farthest_on_piece(lens.d1.center, piece)
    e2, s2 = farthest_on_piece(lens.d2.center, piece)
    if e1 >= e2:
        return (e1 - lens.radius, s1)
    return (e2 - lens.radius, s2)


def piece_in_disk(piece: Piece, disk: Disk, eps: float = 0.0) -> bool:
    d, _s = farthest_on_piece(disk.center, piece)
    return d <= disk.radius + eps


# ---------------------------------------------------------------------------
# bounding boxes


def piece_bbox(piece: Piece) -> tuple:
    if isinstance(piece, Segment):
        return (min(piece.start.x, piece.end.x), min(piece.start.y, piece.end.y),
                max(piece.start.x, piece.end.x), max(piece.start.y, piece.end.y))
    pts = [piece.start_point, piece.end_point]
    for k, axis in enumerate((0.0, math.pi / 2, math.pi, 3 * math.pi / 2)):
        s = arc_offset_of_angle(piece, axis)
        if s is not None:
            pts.append(piece.point_at(s))
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    return (min(xs), min(ys), max(xs), max(ys))


def pieces_bbox(pieces: Sequence[Piece]) -> tuple:
    boxes = [piece_bbox(p) for p in pieces]
    return (min(b[0] for b in boxes), min(b[1] for b in boxes),
            max(b[2] for b in boxes), max(b[3] for b in boxes))


# ---------------------------------------------------------------------------
# winding numbers

# quasi-random ray directions; retried in order when a cast is ambiguous
_RAY_ANGLES = tuple(((0.137 + k * 0.6180339887498949) % 1.0) * TWO_PI
                    for k in range(24))


def _cast_ray(p: Point, d: Point, pieces: Sequence[Piece], scale: float):
    """Signed crossing count of the chain over the ray p + t*d, t > 0.

    Returns (count, ok); ok is False when any hit is too close to a piece
    endpoint or too close to tangential for a reliable sign.
    """
    edge = 1e-9
    total = 0
    for piece in pieces:
        if isinstance(piece, Segment):
            v = piece.end - piece.start
            w = piece.start - p
            denom = d.cross(v)
            if abs(denom) <= 1e-12 * max(v.norm, 1.0):
                # parallel; ambiguous only if the line passes near p
                if v.norm > 0 and abs(w.cross(v)) / v.norm <= edge * scale:
                    return (0, False)
                continue
            t = w.cross(v) / denom
            u = -d.cross(w) / denom
            if t <= 0.0:
                continue
            if u < -edge or u > 1.0 + edge:
                continue
            if u < edge or u > 1.0 - edge:
                return (0, False)
            total += 1 if denom > 0 else -1
        else:
            w = piece.center - p
            tc = w.dot(d)
            h = d.cross(w)
            disc = piece.radius * piece.radius - h * h
            r_edge = edge * piece.radius
            if disc <= r_edge * r_edge:
                if disc >= -r_edge * r_edge and tc > 0.0:
                    # potentially tangential contact ahead of the ray
                    phi = (p + d * tc - piece.center).angle()
                    if arc_offset_of_angle(piece, phi, tol=1e-6) is not None:
                        return (0, False)
                continue
            dx = math.sqrt(disc)
            span = abs(piece.sweep)
            for t in (tc - dx, tc + dx):
                if t <= 0.0:
                    continue
                hit = p + d * t
                phi = (hit - piece.center).angle()
                u = (piece.sweep_sign * (phi - piece.start_angle)) % TWO_PI
                if u > span + edge and TWO_PI - u > edge:
                    continue
                if u < edge or u > span - edge:
                    return (0, False)
                tau = Point(-math.sin(phi) * piece.sweep_sign,
                            math.cos(phi) * piece.sweep_sign)
                c = d.cross(tau)
                if abs(c) <= 1e-9:
                    return (0, False)
                total += 1 if c > 0 else -1
    return (total, True)


def winding_number(p: Point, pieces: Sequence[Piece], eps: float,
                   check: bool = True) -> int:
    """Winding number of the piece chain around p.

    Raises PointOnCurve when p lies within eps of the chain (check=True).
    A clockwise simple loop yields -1 at interior points and 0 outside.
    """
    if check:
        for piece in pieces:
            dist, _s = closest_on_piece(p, piece)
            if dist <= eps:
                raise PointOnCurve(f"point ({p.x!r}, {p.y!r}) lies on the curve")
    x0, y0, x1, y1 = pieces_bbox(pieces)
    scale = max(x1 - x0, y1 - y0, 1e-300)
    for ang in _RAY_ANGLES:
        count, ok = _cast_ray(p, from_angle(ang), pieces, scale)
        if ok:
            return count
    raise SearchFailed("no unambiguous ray direction found for winding query")


def _piece_arrays(pieces: Sequence[Piece]):
    """Per-piece scalar data used by the batched queries."""
    out = []
    for piece in pieces:
        if isinstance(piece, Segment):
            out.append(("seg", piece.start.x, piece.start.y,
                        piece.end.x, piece.end.y, piece.length))
        else:
            out.append(("arc", piece.center.x, piece.center.y, piece.radius,
                        piece.start_angle, piece.sweep, piece.sweep_sign))
    return out


def min_distances(points: np.ndarray, pieces: Sequence[Piece]) -> np.ndarray:
    """Vector of min distances from each row of points (n, 2) to the chain."""
    px = points[:, 0]
    py = points[:, 1]
    best = np.full(len(points), np.inf)
    for rec in _piece_arrays(pieces):
        if rec[0] == "seg":
            _k, ax, ay, bx, by, ln = rec
            vx, vy = bx - ax, by - ay
            ll = vx * vx + vy * vy
            if ll == 0.0:
                d = np.hypot(px - ax, py - ay)
            else:
                t = np.clip(((px - ax) * vx + (py - ay) * vy) / ll, 0.0, 1.0)
                d = np.hypot(px - (ax + t * vx), py - (ay + t * vy))
        else:
            _k, ox, oy, r, a0, sweep, sg = rec
            rx, ry = px - ox, py - oy
            dc = np.hypot(rx, ry)
            phi = np.arctan2(ry, rx)
            u = (sg * (phi - a0)) % TWO_PI
            inside = u <= abs(sweep)
            e0x = ox + r * math.cos(a0)
            e0y = oy + r * math.sin(a0)
            e1x = ox + r * math.cos(a0 + sweep)
            e1y = oy + r * math.sin(a0 + sweep)
            d_end = np.minimum(np.hypot(px - e0x, py - e0y),
                               np.hypot(px - e1x, py - e1y))
            d = np.where(inside, np.abs(dc - r), d_end)
        best = np.minimum(best, d)
    return best


def winding_numbers(points: np.ndarray, pieces: Sequence[Piece]) -> np.ndarray:
    """Batched winding numbers for rows of points (n, 2).

    Callers must keep the points off the chain; ambiguous casts are
    retried per point with fresh ray directions.
    """
    n = len(points)
    result = np.zeros(n, dtype=np.int64)
    pending = np.ones(n, dtype=bool)
    recs = _piece_arrays(pieces)
    edge = 1e-9
    for ang in _RAY_ANGLES:
        if not pending.any():
            break
        idx = np.nonzero(pending)[0]
        px = points[idx, 0]
        py = points[idx, 1]
        dx_, dy_ = math.cos(ang), math.sin(ang)
        counts = np.zeros(len(idx), dtype=np.int64)
        bad = np.zeros(len(idx), dtype=bool)
        for rec in recs:
            if rec[0] == "seg":
                _k, ax, ay, bx, by, ln = rec
                vx, vy = bx - ax, by - ay
                denom = dx_ * vy - dy_ * vx
                wx, wy = ax - px, ay - py
                wcv = wx * vy - wy * vx
                if abs(denom) <= 1e-12 * max(ln, 1.0):
                    vn = math.hypot(vx, vy)
                    if vn > 0:
                        bad |= np.abs(wcv) / vn <= edge * max(ln, 1.0)
                    continue
                t = wcv / denom
                u = -(dx_ * wy - dy_ * wx) / denom
                ahead = t > 0.0
                hit = ahead & (u >= -edge) & (u <= 1.0 + edge)
                amb = hit & ((u < edge) | (u > 1.0 - edge))
                bad |= amb
                counts += np.where(hit & ~amb, 1 if denom > 0 else -1, 0)
            else:
                _k, ox, oy, r, a0, sweep, sg = rec
                wx, wy = ox - px, oy - py
                tc = wx * dx_ + wy * dy_
                h = dx_ * wy - dy_ * wx
                disc = r * r - h * h
                r_edge = edge * r
                graze = (np.abs(disc) <= r_edge * r_edge) & (tc > 0.0)
                bad |= graze
                ok = disc > r_edge * r_edge
                sq = np.sqrt(np.where(ok, disc, 0.0))
                span = abs(sweep)
                for t in (tc - sq, tc + sq):
                    ahead = ok & (t > 0.0)
                    hx = px + dx_ * t - ox
                    hy = py + dy_ * t - oy
                    phi = np.arctan2(hy, hx)
                    u = (sg * (phi - a0)) % TWO_PI
                    in_span = ahead & ((u <= span + edge) | (TWO_PI - u <= edge))
                    amb = in_span & ((u < edge) | (u > span - edge))
                    bad |= amb
                    c = dx_ * sg * np.cos(phi) + dy_ * sg * np.sin(phi)
                    amb2 = in_span & (np.abs(c) <= 1e-9)
                    bad |= amb2
                    good = in_span & ~amb & ~amb2
                    counts += np.where(good, np.sign(c).astype(np.int64), 0)
        done = ~bad
        result[idx[done]] = counts[done]
        pending[idx[done]] = False
    if pending.any():
        raise SearchFailed(
            f"winding query unresolved for {int(pending.sum())} points")
    return result
