"""Rolling-disk decomposition into maximal rolling and excluded regions.

A radius-r disk seeded on one side of the loop rolls clockwise along the
boundary, its center riding the offset of the current piece.  Where an
essential terminal pair pinches the passage the stuck disk contributes a
replacement arc bridging its two contact points, the rolling jumps across
the pinch, and the cut-off sub-curve is left for other regions.  Boundary
stretches claimed by no rolling region are stitched with the adjacent
replacement arcs into excluded regions: corridors between two or more
arcs are necks, dead ends behind a single arc are plain exclusions.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .classify import SWEEP_N, TerminalPair, find_end, find_essential_pairs, is_essential
from .errors import (NonTermination, NoSeed, ResolutionExhausted, SearchFailed,
                     StuckState, TransversalSeed)
from .geometry import (Arc, Disk, Point, Segment, TWO_PI,
                       circle_piece_intersections, min_distances, wrap_angle,
                       winding_numbers)
from .loop import Loop
from .raster import _side_region, opening_components
from .rolling import ContactClass, ContactKind, Side, disk_fits, tangent_disk

# event-scan density along the contact parameter, in samples per radius
SCAN_PER_R = 32


class RollEvent(enum.Enum):
    SEED = "seed"
    JUNCTION = "junction"
    CONTACT = "contact"
    ESSENTIAL = "essential"


class RegionKind(enum.Enum):
    ROLLING = "rolling"
    EXCLUDED = "excluded"
    NECK = "neck"


@dataclass(frozen=True)
class RollState:
    """One pose of the rolling disk: tangent at contact_t on the given side."""

    disk: Disk
    contact_t: float
    contact_class: ContactClass
    side: Side
    event: RollEvent = RollEvent.SEED
    pair: Optional[TerminalPair] = None


@dataclass(frozen=True)
class ReplacementArc:
    """Shorter arc of a stuck disk joining its two tangency points.

    Bridges the essential pair in place of the cut-off sub-curve; as a
    boundary piece it behaves like its underlying Arc.
    """

    geometry: Arc
    pair: TerminalPair

    @property
    def length(self) -> float:
        return self.geometry.length

    @property
    def start_point(self) -> Point:
        return self.geometry.start_point

    @property
    def end_point(self) -> Point:
        return self.geometry.end_point

    def reversed_(self) -> "ReplacementArc":
        # keep pair.t1 at the geometric start: swap params and classes
        back = TerminalPair(self.pair.t2, self.pair.t1,
                            self.pair.class_21, self.pair.class_12)
        return ReplacementArc(self.geometry.reversed_(), back)


def _flatten(boundary) -> list:
    return [b.geometry if isinstance(b, ReplacementArc) else b
            for b in boundary]


def _chain_area(pieces) -> float:
    # Green's theorem; negative for clockwise chains
    total = 0.0
    for p in pieces:
        if isinstance(p, Segment):
            total += 0.5 * p.start.cross(p.end)
        else:
            a0, a1 = p.start_angle, p.end_angle
            total += 0.5 * (p.radius * p.radius * p.sweep
                            + p.radius * (p.center.x * (math.sin(a1) - math.sin(a0))
                                          - p.center.y * (math.cos(a1) - math.cos(a0))))
    return total


@dataclass(frozen=True)
class Region:
    """One cell of the decomposition, bounded by loop pieces and replacements."""

    boundary: tuple
    kind: RegionKind
    side: Side
    center_trace: Optional[tuple] = None
    intervals: tuple = ()

    @property
    def pieces(self) -> list:
        return _flatten(self.boundary)

    @property
    def replacements(self) -> list:
        return [b for b in self.boundary if isinstance(b, ReplacementArc)]

    def signed_area(self) -> float:
        return _chain_area(self.pieces)

    @property
    def bounded(self) -> bool:
        # an external chain enclosing material clockwise bounds nothing:
        # the region is the unbounded complement
        return self.side is Side.INTERNAL or self.signed_area() > 0.0

    @property
    def area(self) -> float:
        return abs(self.signed_area()) if self.bounded else math.inf

    def as_loop(self, kappa: float) -> Loop:
        pieces = self.pieces
        if _chain_area(pieces) > 0.0:
            pieces = [p.reversed_() for p in reversed(pieces)]
        return Loop(pieces, kappa)

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        """Membership mask for (n, 2) sample points, by nonzero winding."""
        inside = winding_numbers(pts, self.pieces) != 0
        if not self.bounded:
            inside = ~inside
        return inside


@dataclass(frozen=True)
class Decomposition:
    regions: tuple
    side: Side
    stats: dict


# ---------------------------------------------------------------------------
# offset-curve stepping


def _ccw(a0: float, a1: float) -> float:
    s = wrap_angle(a1 - a0)
    return s + TWO_PI if s < 0.0 else s


def _cw(a0: float, a1: float) -> float:
    s = wrap_angle(a1 - a0)
    return s - TWO_PI if s > 0.0 else s


def _centers_on_piece(piece, s: np.ndarray, r: float, sign: float) -> np.ndarray:
    """Disk centers for contact offsets s along one piece (sign=+1 internal)."""
    if isinstance(piece, Segment):
        d = piece.direction
        pts = (np.array([piece.start.x, piece.start.y])
               + s[:, None] * np.array([d.x, d.y]))
        n = np.array([d.y, -d.x])  # tangent rotated -90: inward for CW loops
        return pts + sign * r * n
    ang = piece.start_angle + piece.sweep_sign * s / piece.radius
    radial = np.column_stack([np.cos(ang), np.sin(ang)])
    pts = np.array([piece.center.x, piece.center.y]) + piece.radius * radial
    # inward normal on an arc is radial for CCW pieces, anti-radial for CW
    n = radial * piece.sweep_sign
    return pts + sign * r * n


def _center_at(loop: Loop, t: float, side: Side) -> Point:
    return tangent_disk(loop, t, side).center


def _penetration(loop: Loop, side: Side, others, c: np.ndarray) -> float:
    return float(loop.radius - min_distances(np.atleast_2d(c), others)[0])


def _first_penetration(loop: Loop, side: Side, index: int, s0: float):
    """First contact event on piece `index` past offset s0, or None.

    Scans the offset path at SCAN_PER_R samples per radius for penetration
    of any other piece, then bisects the crossing.  Returns
    (s_star, center, touch_t).
    """
    piece = loop.pieces[index]
    r = loop.radius
    sign = 1.0 if side is Side.INTERNAL else -1.0
    span = piece.length - s0
    tiny = 1e-12 * loop.length
    if span <= tiny:
        return None
    others = [p for j, p in enumerate(loop.pieces) if j != index]
    if not others:
        return None
    # detection needs headroom over junction tangencies and exact-width
    # sliding (both hold g near 0); the polish target just clears float
    # noise so replacement arcs close the chain to loop tolerance
    tol_pen = max(4.0 * loop.tol.eps_geom, 1e-9 * r)
    g_tiny = 1e-12 * r
    n = max(2, int(math.ceil(span * SCAN_PER_R / r)) + 1)
    svals = np.linspace(s0, piece.length, n)
    centers = _centers_on_piece(piece, svals, r, sign)
    g = r - min_distances(centers, others)
    hits = np.nonzero(g > tol_pen)[0]
    if not len(hits):
        return None
    k = int(hits[0])
    if k == 0:
        # already penetrating at the scan start: degenerate pose
        raise StuckState(
            f"disk penetrates the loop at contact offset {s0!r} "
            f"on piece {index} (depth {g[0]!r})")
    lo, hi = svals[k - 1], svals[k]
    back = k - 1
    while back > 0 and g[back] > g_tiny:
        back -= 1
        lo = svals[back]
    for _ in range(80):
        if hi - lo <= 1e-14 * max(1.0, loop.length):
            break
        mid = 0.5 * (lo + hi)
        c = _centers_on_piece(piece, np.array([mid]), r, sign)[0]
        if r - min_distances(c[None, :], others)[0] > g_tiny:
            hi = mid
        else:
            lo = mid
    s_star = lo
    c = _centers_on_piece(piece, np.array([s_star]), r, sign)[0]
    center = Point(float(c[0]), float(c[1]))
    _dist, touch_t = loop.closest_param(center)
    return s_star, center, touch_t


def _junctions(loop: Loop) -> list:
    js = list(loop.junction_params())
    if len(js) == len(loop.pieces):
        js.append(loop.length)
    return js


def _next_event(loop: Loop, side: Side, t: float):
    """Advance the contact from t to the next junction or contact event."""
    i, s = loop.locate(t)
    js = _junctions(loop)
    hit = _first_penetration(loop, side, i, s)
    if hit is None:
        return ("junction", loop.wrap(js[i + 1]))
    s_star, center, touch_t = hit
    return ("contact", loop.wrap(js[i] + s_star), center, touch_t)


def _replacement(loop: Loop, center: Point, t_stuck: float,
                 t_touch: float) -> ReplacementArc:
    """Shorter disk arc bridging the stuck pair, oriented to continue C1."""
    r = loop.radius
    p1 = loop.point_at(t_stuck)
    p2 = loop.point_at(t_touch)
    a1 = (p1 - center).angle()
    a2 = (p2 - center).angle()
    incoming = loop.tangent_at(t_stuck)
    if incoming.dot((p1 - center).unit().rot_ccw()) > 0.0:
        sweep = _ccw(a1, a2)
    else:
        sweep = _cw(a1, a2)
    if abs(sweep) > math.pi + 1e-6:
        raise StuckState(
            f"replacement arc at pair ({t_stuck!r}, {t_touch!r}) is not "
            f"the minor arc (sweep {sweep!r})")
    pair = is_essential(loop, t_stuck, t_touch)
    return ReplacementArc(Arc(center, r, a1, sweep), pair)


# ---------------------------------------------------------------------------
# public rolling operations


def seed_disk(loop: Loop, side: Side, resolution: float = None) -> Disk:
    """Radius-r disk on the given side, tangent to the loop.

    The center starts at the raster clearance argmax and is projected to
    tangency at the nearest boundary point.
    """
    r = loop.radius
    res = resolution if resolution is not None else r / 50.0
    comps, mask, fld = opening_components(loop, side.value, res,
                                          with_grid=True)
    if not comps:
        raise NoSeed(f"no {side.value} cell admits a radius-{r} disk "
                     f"at resolution {res}")
    return _seed_in_component(loop, side, comps[0], mask, fld)


def _seed_in_component(loop: Loop, side: Side, comp, mask, fld) -> Disk:
    depth = np.where(comp, fld.dist, -np.inf)
    iy, ix = np.unravel_index(int(np.argmax(depth)), depth.shape)
    center = Point(mask.origin.x + ix * mask.cell,
                   mask.origin.y + iy * mask.cell)
    _dist, t0 = loop.closest_param(center)
    disk = tangent_disk(loop, t0, side)
    ok, _cc = disk_fits(loop, disk, side)
    if not ok:
        raise NoSeed(f"clearance-peak projection at t={t0!r} does not fit "
                     f"on side {side.value}")
    return disk


def _state_for(loop: Loop, side: Side, t: float, event: RollEvent,
               pair: Optional[TerminalPair] = None) -> RollState:
    disk = tangent_disk(loop, t, side)
    if pair is None:
        _ok, cc = disk_fits(loop, disk, side)
    else:
        cc = ContactClass(ContactKind.SINGLETON, (loop.point_at(t),))
    return RollState(disk, t, cc, side, event, pair)


def start_state(loop: Loop, seed: Disk, side: Side) -> RollState:
    """RollState for a seed disk, recovering its tangency parameter."""
    dist, t0 = loop.closest_param(seed.center)
    if abs(dist - loop.radius) > 1e-6 * loop.radius:
        raise NoSeed(f"seed disk is not tangent: boundary distance {dist!r}")
    return _state_for(loop, side, t0, RollEvent.SEED)


def roll(loop: Loop, state: RollState, direction: str = "clockwise") -> RollState:
    """Advance the rolling disk to its next contact event.

    Junction events report the pose entering the next piece; contact
    events report the stuck pose together with the blocking pair, marked
    essential or not.
    """
    if direction != "clockwise":
        raise ValueError(f"only clockwise rolling is defined, got {direction!r}")
    ev = _next_event(loop, state.side, state.contact_t)
    if ev[0] == "junction":
        return _state_for(loop, state.side, ev[1], RollEvent.JUNCTION)
    _tag, u, center, touch_t = ev
    pair = is_essential(loop, u, touch_t)
    event = RollEvent.ESSENTIAL if pair.essential else RollEvent.CONTACT
    disk = Disk(center, loop.radius)
    cc = ContactClass(ContactKind.SINGLETON, (loop.point_at(u),))
    return RollState(disk, u, cc, state.side, event, pair)


def _trace(loop: Loop, side: Side, intervals) -> tuple:
    pts = []
    step = loop.radius / 16.0
    sign = 1.0 if side is Side.INTERNAL else -1.0
    for (a, b) in intervals:
        d = loop.forward(a, b) if b != a + loop.length else loop.length
        ts = loop.wrap(a) + np.linspace(0.0, d, max(2, int(d / step) + 1))
        ps = loop.points_at(ts)
        tans = loop.tangents_at(ts)
        normals = np.column_stack([tans[:, 1], -tans[:, 0]]) * sign
        cs = ps + loop.radius * normals
        pts.extend(Point(float(x), float(y)) for x, y in cs)
    return tuple(pts)


def rolling_region(loop: Loop, seed: Disk, side: Side) -> Region:
    """Maximal rolling region reachable from the seed disk.

    The disk rolls clockwise; every essential blockage emits a
    ReplacementArc and the contact jumps to the far tangency.  Terminates
    when the first stuck pose recurs, or after one full silent cycle.
    """
    state = start_state(loop, seed, side)
    t0 = state.contact_t
    L = loop.length
    families = find_essential_pairs(loop)
    max_jumps = 2 * len(families) + 2
    budget = (len(loop.pieces) + 4) * (max_jumps + 2) + 64
    close_tol = 1e-6 * L

    t = t0
    advanced = 0.0
    first_stuck = None
    lambdas = []  # (a, b, ReplacementArc)
    while True:
        budget -= 1
        if budget < 0:
            raise NonTermination(
                f"rolling exceeded its event budget with {len(lambdas)} "
                f"replacements (families: {len(families)})")
        ev = _next_event(loop, side, t)
        if ev[0] == "junction":
            t_next = ev[1]
            step = loop.forward(t, t_next) if t_next != t else L - advanced
            if first_stuck is None:
                advanced += step
                if advanced >= L - 1e-9 * L:
                    # silent full cycle: the whole domain side rolls
                    return Region(tuple(loop.pieces), RegionKind.ROLLING,
                                  side, _trace(loop, side, [(0.0, L)]),
                                  ((0.0, L),))
            t = t_next
            continue
        _tag, u, center, touch_t = ev
        if first_stuck is not None and (
                loop.cyclic_gap(u, first_stuck[0]) <= close_tol
                and loop.cyclic_gap(touch_t, first_stuck[1]) <= close_tol):
            break  # back at the first blockage: cycle closed
        pair = is_essential(loop, u, touch_t)
        if not pair.essential:
            raise StuckState(
                f"blocking contact at ({u!r}, {touch_t!r}) is not an "
                f"essential pair; rolling cannot continue")
        if len(lambdas) >= max_jumps:
            raise NonTermination(
                f"more replacement arcs than {max_jumps} allowed by "
                f"{len(families)} essential families")
        lambdas.append((u, touch_t, _replacement(loop, center, u, touch_t)))
        if first_stuck is None:
            first_stuck = (u, touch_t)
        t = touch_t

    boundary = []
    intervals = []
    k = len(lambdas)
    for j, (_a, b, repl) in enumerate(lambdas):
        boundary.append(repl)
        next_a = lambdas[(j + 1) % k][0]
        boundary.extend(loop.subcurve(b, next_a))
        intervals.append((b, next_a))
    return Region(tuple(boundary), RegionKind.ROLLING, side,
                  _trace(loop, side, intervals), tuple(intervals))


# ---------------------------------------------------------------------------
# excluded regions


def _excluded_regions(loop: Loop, side: Side, rollers: list) -> list:
    """Stitch uncovered boundary stretches with adjacent replacement arcs."""
    lambdas = []
    for reg in rollers:
        for b in reg.boundary:
            if isinstance(b, ReplacementArc):
                lambdas.append(b)
    if not lambdas:
        return []
    regions = []
    unused = list(range(len(lambdas)))
    a_params = [lam.pair.t1 for lam in lambdas]
    b_params = [lam.pair.t2 for lam in lambdas]
    while unused:
        start = unused.pop(0)
        chain = []
        intervals = []
        cur = start
        for _hop in range(len(lambdas) + 1):
            lam = lambdas[cur]
            chain.append(lam.reversed_())
            gap_start = a_params[cur]
            # the uncovered stretch past a stuck point runs to the nearest
            # touch endpoint forward; no stuck endpoint can come first
            best, best_d = -1, math.inf
            for i, bp in enumerate(b_params):
                d = loop.forward(gap_start, bp)
                if d < best_d:
                    best, best_d = i, d
            nxt = best
            if best_d > loop.tol.eps_param:
                chain.extend(loop.subcurve(gap_start, b_params[nxt]))
                intervals.append((gap_start, b_params[nxt]))
            if nxt == start:
                break
            if nxt not in unused:
                raise ResolutionExhausted(
                    f"replacement arc at {b_params[nxt]!r} claimed twice "
                    f"while stitching excluded regions")
            unused.remove(nxt)
            cur = nxt
        else:
            raise ResolutionExhausted(
                "excluded-region chain failed to close within the "
                "replacement budget")
        kind = RegionKind.NECK if sum(
            1 for c in chain if isinstance(c, ReplacementArc)) >= 2 \
            else RegionKind.EXCLUDED
        regions.append(Region(tuple(chain), kind, side, None,
                              tuple(intervals)))
    return regions


# ---------------------------------------------------------------------------
# neck detection and transversal recursion


def handle_disk_intersections(loop: Loop, d: Disk) -> list:
    """Essential pairs among the transversal crossings of a disk.

    Crossing parameters are collected piecewise, deduplicated at shared
    junctions, and every unordered pair is classified.
    """
    js = _junctions(loop)
    params = []
    for i, piece in enumerate(loop.pieces):
        for s, _p, kind in circle_piece_intersections(d.center, d.radius,
                                                      piece):
            if kind == "transversal":
                params.append(loop.wrap(js[i] + s))
    params.sort()
    dedup = []
    tol = 1e-9 * max(1.0, loop.length)
    for t in params:
        if all(loop.cyclic_gap(t, q) > tol for q in dedup):
            dedup.append(t)
    pairs = []
    for i in range(len(dedup)):
        for j in range(i + 1, len(dedup)):
            tp = is_essential(loop, dedup[i], dedup[j])
            if tp.essential:
                pairs.append(tp)
    return pairs


def _nearest_lambda(loop: Loop, region: Region, p: Point, q: Point):
    """Replacement of `region` whose chord midpoint is nearest to that of (p, q).

    Family representatives and physical stuck pairs differ by a little,
    so matching goes by chord geometry rather than parameter containment.
    """
    mid = (p + q) * 0.5
    best, best_d = None, math.inf
    for b in region.boundary:
        if not isinstance(b, ReplacementArc):
            continue
        m = (loop.point_at(b.pair.t1) + loop.point_at(b.pair.t2)) * 0.5
        d = m.distance(mid)
        if d < best_d:
            best, best_d = b, d
    return best


def detect_neck(loop: Loop, pair: TerminalPair, side: Side = Side.INTERNAL):
    """Neck behind an essential pair: (Region, inner TerminalPair).

    Seeds a disk at an end terminal inside the cut-off sub-curve (t1, t2)
    and rolls it; the replacement facing back toward the chord gives the
    inner pair, and the two wall stretches plus both replacement arcs
    close the neck.  When no disk fits beyond the chord the whole cut-off
    pocket is one excluded region and the inner pair is None.  A seed
    that crosses the loop transversally with further essential pairs
    raises TransversalSeed carrying those pairs.
    """
    if not pair.essential:
        raise ValueError("detect_neck requires an essential pair")
    t1, t2 = pair.t1, pair.t2
    p1, p2 = loop.point_at(t1), loop.point_at(t2)

    near = _probe_region(loop, side, t2, t1)
    lam_out = _nearest_lambda(loop, near, p1, p2) if near else None
    if lam_out is None:
        raise SearchFailed(
            f"no replacement bridging ({t1!r}, {t2!r}) found on the near side")
    a_o, b_o = lam_out.pair.t1, lam_out.pair.t2

    far = _probe_region(loop, side, t1, t2, outer_pair=(a_o, b_o))
    if far is None:
        # dead end: nothing beyond the chord admits a disk
        chain = [lam_out.reversed_()]
        chain.extend(loop.subcurve(a_o, b_o))
        region = Region(tuple(chain), RegionKind.EXCLUDED, side, None,
                        ((a_o, b_o),))
        return region, None
    lam_in = _nearest_lambda(loop, far, loop.point_at(a_o), loop.point_at(b_o))
    if lam_in is None:
        raise SearchFailed(
            f"far rolling region has no replacement inside ({a_o!r}, {b_o!r})")
    a_f, b_f = lam_in.pair.t1, lam_in.pair.t2
    chain = [lam_out.reversed_()]
    chain.extend(loop.subcurve(a_o, b_f))
    chain.append(lam_in.reversed_())
    chain.extend(loop.subcurve(a_f, b_o))
    region = Region(tuple(chain), RegionKind.NECK, side, None,
                    ((a_o, b_f), (a_f, b_o)))
    return region, lam_in.pair


def _probe_region(loop: Loop, side: Side, t1: float, t2: float,
                  outer_pair=None) -> Optional[Region]:
    """Rolling region seeded at an end terminal inside the forward arc (t1, t2)."""
    try:
        end = find_end(loop, t1, t2)
    except SearchFailed:
        return None
    seed = tangent_disk(loop, end.t1, side)
    ok, cc = disk_fits(loop, seed, side)
    if not ok:
        pairs = handle_disk_intersections(loop, seed)
        if outer_pair is not None:
            span = loop.forward(outer_pair[0], outer_pair[1])
            pairs = [p for p in pairs
                     if loop.forward(outer_pair[0], p.t1) < span
                     and loop.forward(outer_pair[0], p.t2) < span]
        if pairs:
            raise TransversalSeed(
                f"seed at end terminal {end.t1!r} crosses the loop; "
                f"{len(pairs)} deeper essential pairs found")
        return None
    return rolling_region(loop, seed, side)


# ---------------------------------------------------------------------------
# full decomposition


def decompose(loop: Loop, side: Side, resolution: float = None) -> Decomposition:
    """Partition the side's domain into rolling and excluded regions.

    One rolling region is traced per connected component of the raster
    opening; boundary stretches left uncovered become excluded regions
    stitched from the adjacent replacement arcs.
    """
    r = loop.radius
    res = resolution if resolution is not None else r / 50.0
    comps, mask, fld = opening_components(loop, side.value, res,
                                          with_grid=True)
    if not comps:
        raise NoSeed(f"side {side.value} admits no radius-{r} disk "
                     f"at resolution {res}")
    rollers = []
    for comp in comps:
        seed = _seed_in_component(loop, side, comp, mask, fld)
        reg = rolling_region(loop, seed, side)
        if any(_same_region(loop, reg, other) for other in rollers):
            continue
        rollers.append(reg)
    excluded = _excluded_regions(loop, side, rollers)
    regions = tuple(rollers + excluded)
    counts = {
        RegionKind.ROLLING: 0,
        RegionKind.NECK: 0,
        RegionKind.EXCLUDED: 0,
    }
    for reg in regions:
        counts[reg.kind] += 1
    stats = {
        "regions": len(regions),
        "rolling": counts[RegionKind.ROLLING],
        "neck": counts[RegionKind.NECK],
        "excluded": counts[RegionKind.EXCLUDED],
        "areas": tuple(reg.area for reg in regions),
        "resolution": res,
    }
    return Decomposition(regions, side, stats)


def _same_region(loop: Loop, a: Region, b: Region) -> bool:
    pa = [lam.pair for lam in a.replacements]
    pb = [lam.pair for lam in b.replacements]
    if len(pa) != len(pb):
        return False
    if not pa:
        return True
    tol = 1e-6 * loop.length
    for p in pa:
        if not any(loop.cyclic_gap(p.t1, q.t1) <= tol
                   and loop.cyclic_gap(p.t2, q.t2) <= tol for q in pb):
            return False
    return True
