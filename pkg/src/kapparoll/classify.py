"""Short/long/simple verdicts for sub-curves and the searches built on them.

A sub-curve whose chord is below the diameter 2r is short when it stays
inside the lens of radius-r circles through its endpoints, long when it
provably escapes that lens.  Terminal pairs with both sides long are called
essential; they drive the rest of the module: the essential-pair sweep,
long-arc extraction, minimal ends, half-disk containment, opposite-tangent
pairs, and the three-parallel-tangents certificate of nonconvexity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (ContainmentViolated, DegenerateChord, SearchFailed)
from .geometry import (Arc, Disk, Lens, Point, Segment, arc_offset_of_angle,
                       lens_of_chord, min_distances, piece_extreme_along,
                       piece_in_disk, piece_lens_excess,
                       piece_piece_intersections, winding_numbers)
from .loop import Loop

SWEEP_N = 512
# A long sub-curve is at least half a turn; prune the pair sweep with slack.
MIN_SIDE_FACTOR = 0.9
# Essential candidates whose matched sides overlap beyond this fraction of
# the shorter side belong to the same family.
OVERLAP_FRACTION = 0.5
# A minimal end reaches the full rolling radius above its chord.  Peak
# heights are exact per-piece evaluations, but chords that touch the
# diameter tangentially leave a sqrt-machine-eps plateau in the root
# position, tilting the chord by ~1e-8; the slack must cover that.
HEIGHT_SLACK = 1e-7


# ---------------------------------------------------------------------------
# result records


@dataclass(frozen=True)
class ArcClass:
    """Verdict for one side of a terminal pair.

    witness_outside is present exactly when the side is long: the loop
    parameter and point of maximal lens violation.
    """

    is_short: bool
    is_long: bool
    is_simple: bool
    chord: float
    witness_outside: Optional[tuple] = None


@dataclass(frozen=True)
class TerminalPair:
    t1: float
    t2: float
    class_12: ArcClass
    class_21: ArcClass

    @property
    def essential(self) -> bool:
        return self.class_12.is_long and self.class_21.is_long


@dataclass(frozen=True)
class End:
    """Minimal chord-2r sub-arc bulging a full radius past its chord."""

    t1: float
    t2: float
    circle: Disk
    length: float
    essential: bool


@dataclass(frozen=True)
class HalfDisk:
    """Half of a radius-r disk, split by the chord through its center."""

    center: Point
    radius: float
    toward: Point  # unit chord normal pointing into the covered half

    @property
    def along(self) -> Point:
        return self.toward.rot_cw()


@dataclass(frozen=True)
class ParallelTangentPair:
    t1: float
    t2: float
    direction: Point  # unit tangent at t1; the tangent at t2 is its negation


@dataclass(frozen=True)
class CrossSection:
    """Chord of an end, guaranteed to span a full diameter."""

    a: Point
    b: Point
    length: float
    t1: float
    t2: float


# ---------------------------------------------------------------------------
# sub-curve classification


def _subcurve_with_offsets(loop: Loop, t1: float, t2: float) -> list:
    out = []
    acc = 0.0
    for piece in loop.subcurve(t1, t2):
        out.append((acc, piece))
        acc += piece.length
    return out


def classify_subcurve(loop: Loop, t1: float, t2: float) -> ArcClass:
    """Classify the forward sub-curve from t1 to t2.

    Chords at or beyond the diameter make the pair simple; short then means
    the sub-curve fits the single disk on the chord midpoint.  Below the
    diameter the verdict is short iff every piece stays inside the chord
    lens, long otherwise, with the worst violation as witness.
    """
    eps = loop.tol.eps_geom
    p = loop.point_at(t1)
    q = loop.point_at(t2)
    chord = p.distance(q)
    if chord <= eps:
        raise DegenerateChord(
            f"terminals {t1!r}, {t2!r} are {chord!r} apart")
    two_r = 2.0 * loop.radius
    if chord >= two_r - eps:
        short = False
        if chord <= two_r + eps:
            disk = Disk((p + q) * 0.5, loop.radius)
            short = all(piece_in_disk(piece, disk, eps)
                        for piece in loop.subcurve(t1, t2))
        return ArcClass(is_short=short, is_long=False, is_simple=True,
                        chord=chord)
    lens = lens_of_chord(p, q, loop.radius, eps)
    worst = -math.inf
    worst_param = 0.0
    worst_point = p
    for off, piece in _subcurve_with_offsets(loop, t1, t2):
        excess, s = piece_lens_excess(piece, lens)
        if excess > worst:
            worst = excess
            worst_param = loop.wrap(t1 + off + s)
            worst_point = piece.point_at(s)
    if worst <= eps:
        return ArcClass(is_short=True, is_long=False, is_simple=False,
                        chord=chord)
    return ArcClass(is_short=False, is_long=True, is_simple=False,
                    chord=chord, witness_outside=(worst_param, worst_point))


def is_essential(loop: Loop, t1: float, t2: float) -> TerminalPair:
    """Full two-sided classification of a terminal pair."""
    return TerminalPair(t1, t2,
                        classify_subcurve(loop, t1, t2),
                        classify_subcurve(loop, t2, t1))


def _side_escapes(loop: Loop, t1: float, t2: float, lens: Lens,
                  eps: float) -> bool:
    # boolean-only variant of the lens test with an early exit
    for piece in loop.subcurve(t1, t2):
        excess, _s = piece_lens_excess(piece, lens)
        if excess > eps:
            return True
    return False


def _pair_essential(loop: Loop, t1: float, t2: float) -> bool:
    eps = loop.tol.eps_geom
    p = loop.point_at(t1)
    q = loop.point_at(t2)
    chord = p.distance(q)
    if chord <= 2.0 * eps or chord >= 2.0 * loop.radius - eps:
        return False
    lens = lens_of_chord(p, q, loop.radius, eps)
    return (_side_escapes(loop, t1, t2, lens, eps)
            and _side_escapes(loop, t2, t1, lens, eps))


# ---------------------------------------------------------------------------
# essential-pair sweep


def _cache(loop: Loop) -> dict:
    store = getattr(loop, "_classify_cache", None)
    if store is None:
        store = {}
        loop._classify_cache = store
    return store


def _sweep_params(loop: Loop, sweep_n: int) -> np.ndarray:
    base = np.arange(sweep_n) * (loop.length / sweep_n)
    ts = np.unique(np.concatenate([base, np.asarray(loop.junction_params())]))
    keep = np.empty(len(ts), dtype=bool)
    keep[0] = True
    keep[1:] = np.diff(ts) > 1e-12 * loop.length
    return ts[keep]


def _essential_raw(loop: Loop, sweep_n: int) -> list:
    """Grid pairs flagged essential, as (t_i, t_j, chord) with t_i < t_j."""
    store = _cache(loop)
    key = ("raw", sweep_n)
    if key in store:
        return store[key]
    ts = _sweep_params(loop, sweep_n)
    pts = loop.points_at(ts)
    eps = loop.tol.eps_geom
    r = loop.radius
    diff = pts[:, None, :] - pts[None, :, :]
    chords = np.hypot(diff[..., 0], diff[..., 1])
    gaps = ts[None, :] - ts[:, None]  # forward gap for i < j
    min_side = MIN_SIDE_FACTOR * math.pi * r
    mask = ((chords > 2.0 * eps) & (chords < 2.0 * r - eps)
            & (gaps >= min_side) & (loop.length - gaps >= min_side))
    mask &= np.triu(np.ones_like(mask, dtype=bool), k=1)
    raw = []
    for i, j in np.argwhere(mask):
        a = float(ts[i])
        b = float(ts[j])
        if _pair_essential(loop, a, b):
            raw.append((a, b, float(chords[i, j])))
    store[key] = raw
    return raw


def _group_families(raw: list, length: float) -> list:
    """Connected components under the matched-side overlap rule."""
    k = len(raw)
    if k == 0:
        return []
    a = np.array([p[0] for p in raw])
    b = np.array([p[1] for p in raw])
    span = b - a
    comp = length - span
    ov = np.minimum(b[:, None], b[None, :]) - np.maximum(a[:, None], a[None, :])
    ov = np.maximum(ov, 0.0)
    # complements overlap wherever neither interval does: measure identity
    ovc = length - span[:, None] - span[None, :] + ov
    # mutual majority overlap on both sides, so a throat nested inside
    # another pair's interval stays a separate family
    lim1 = OVERLAP_FRACTION * np.maximum(span[:, None], span[None, :])
    lim2 = OVERLAP_FRACTION * np.maximum(comp[:, None], comp[None, :])
    adj = (ov >= lim1) & (ovc >= lim2)
    graph = coo_matrix(adj)
    n_comp, labels = connected_components(graph, directed=False)
    groups = [[] for _ in range(n_comp)]
    for idx, lab in enumerate(labels):
        groups[lab].append(idx)
    return groups


def _refine_essential(loop: Loop, t1: float, t2: float,
                      step0: float) -> tuple:
    """Shrink the chord of an essential pair by halving coordinate steps."""
    eps_param = loop.tol.eps_param

    def chord(a: float, b: float) -> float:
        return loop.point_at(a).distance(loop.point_at(b))

    best = chord(t1, t2)
    step = step0
    while step > eps_param:
        moved = False
        for da, db in ((step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)):
            na = loop.wrap(t1 + da)
            nb = loop.wrap(t2 + db)
            c = chord(na, nb)
            if c < best and _pair_essential(loop, na, nb):
                t1, t2, best = na, nb, c
                moved = True
                break
        if not moved:
            step *= 0.5
    return t1, t2


def find_essential_pairs(loop: Loop, sweep_n: int = SWEEP_N) -> list:
    """One refined representative per essential family, minimal chord first.

    An N by N parameter sweep flags candidate pairs, exact lens tests keep
    the essential ones, families merge when matched sides overlap beyond
    half the shorter side, and each family keeps its minimal-chord member
    refined to eps_param.  Output is sorted by (t1, t2).
    """
    store = _cache(loop)
    key = ("families", sweep_n)
    if key in store:
        return store[key]
    raw = _essential_raw(loop, sweep_n)
    reps = []
    for group in _group_families(raw, loop.length):
        members = sorted((raw[i] for i in group),
                         key=lambda p: (p[2], p[0], p[1]))
        reps.append(members[0])
    step0 = loop.length / sweep_n
    pairs = []
    for a, b, _c in reps:
        ra, rb = _refine_essential(loop, a, b, step0)
        lo, hi = (ra, rb) if ra <= rb else (rb, ra)
        pair = is_essential(loop, lo, hi)
        if not pair.essential:  # refinement drifted; keep the grid member
            lo, hi = (a, b) if a <= b else (b, a)
            pair = is_essential(loop, lo, hi)
        pairs.append(pair)
    pairs.sort(key=lambda p: (p.t1, p.t2))
    store[key] = pairs
    return pairs


# ---------------------------------------------------------------------------
# long arcs


def _chord_crossings(loop: Loop, t1: float, t2: float) -> list:
    """Interior transversal crossings of the sub-curve with its chord."""
    p = loop.point_at(t1)
    q = loop.point_at(t2)
    chordseg = Segment(p, q)
    d = loop.forward(t1, t2)
    margin = max(1e-9 * d, loop.tol.eps_param)
    u = chordseg.direction
    cuts = []
    for off, piece in _subcurve_with_offsets(loop, t1, t2):
        for sa, _sb, _pt in piece_piece_intersections(piece, chordseg):
            pos = off + sa
            if pos <= margin or pos >= d - margin:
                continue
            if abs(piece.tangent_at(sa).cross(u)) <= 1e-7:
                continue  # tangential graze, no side change
            cuts.append(pos)
    cuts.sort()
    merged = []
    for c in cuts:
        if merged and c - merged[-1] <= margin:
            continue
        merged.append(c)
    return merged


def _arcify(loop: Loop, t1: float, t2: float, max_splits: int = 64) -> tuple:
    """Shrink a long sub-curve to one that does not recross its chord.

    The sub-lens of a chord drawn between two points of the parent chord
    nests inside the parent lens, so at least one split piece keeps a lens
    violation and stays long.
    """
    a, b = t1, t2
    for _ in range(max_splits):
        cuts = _chord_crossings(loop, a, b)
        if not cuts:
            return a, b
        d = loop.forward(a, b)
        bounds = [0.0] + cuts + [d]
        nxt = None
        for k in range(len(bounds) - 1):
            u = loop.wrap(a + bounds[k])
            v = loop.wrap(a + bounds[k + 1])
            try:
                verdict = classify_subcurve(loop, u, v)
            except DegenerateChord:
                continue
            if verdict.is_long:
                nxt = (u, v)
                break
        if nxt is None:
            raise SearchFailed("no long piece survived the chord split")
        a, b = nxt
    raise SearchFailed("chord-split recursion exceeded its budget")


def find_long_arc(loop: Loop) -> tuple:
    """Terminals (t1, t2) of a long sub-curve that never recrosses its chord.

    The complement of a sufficiently small sub-curve is always long, so a
    few seed positions suffice; the chord-split recursion then removes any
    interior crossings.
    """
    L = loop.length
    r = loop.radius
    for k in range(7):
        base = loop.wrap(k * L / 7.0)
        for frac in (0.05, 0.02, 0.1, 0.01):
            delta = min(frac * r, 0.02 * L)
            b = loop.wrap(base + delta)
            try:
                verdict = classify_subcurve(loop, b, base)
            except DegenerateChord:
                continue
            if verdict.is_long:
                return _arcify(loop, b, base)
    raise SearchFailed("no long sub-curve found from complement seeds")


# ---------------------------------------------------------------------------
# ends


def _chord_heights(loop: Loop, a: float, b: float) -> tuple:
    """Peak offsets of the sub-curve to each side of its chord line."""
    p = loop.point_at(a)
    q = loop.point_at(b)
    n = (q - p).unit().rot_ccw()
    base = p.dot(n)
    h_plus = -math.inf
    h_minus = -math.inf
    for _off, piece in _subcurve_with_offsets(loop, a, b):
        up, _s = piece_extreme_along(piece, n)
        dn, _s = piece_extreme_along(piece, n * -1.0)
        h_plus = max(h_plus, up - base)
        h_minus = max(h_minus, dn + base)
    return h_plus, h_minus, n


def _interior_essential(loop: Loop, a: float, span: float,
                        raw: list) -> bool:
    margin = max(loop.tol.eps_param, 1e-12 * loop.length)
    for u, v, _c in raw:
        pu = loop.forward(a, u)
        pv = loop.forward(a, v)
        if margin < pu < span - margin and margin < pv < span - margin:
            return True
    return False


def _end_is_essential(loop: Loop, a: float, b: float, raw: list) -> bool:
    """Whether the end [a, b] sits inside an arc with essential terminals.

    A detected pair certifies this exactly when neither of its parameters
    falls strictly inside the open end interval: the end is then connected
    within the pair's complement, hence contained in one of its two long
    arcs.
    """
    span = loop.forward(a, b)
    margin = max(loop.tol.eps_param, 1e-12 * loop.length)
    for u, v, _c in raw:
        pu = loop.forward(a, u)
        pv = loop.forward(a, v)
        if (pu <= margin or pu >= span - margin) and \
                (pv <= margin or pv >= span - margin):
            return True
    return False


def _end_candidate_ok(loop: Loop, t1: float, g: float, b_off: float,
                      raw: list) -> bool:
    a = loop.wrap(t1 + g)
    b = loop.wrap(t1 + b_off)
    if _interior_essential(loop, a, b_off - g, raw):
        return False
    h_plus, h_minus, _n = _chord_heights(loop, a, b)
    return max(h_plus, h_minus) >= loop.radius * (1.0 - HEIGHT_SLACK)


def find_end(loop: Loop, t1: float, t2: float, sweep_n: int = SWEEP_N,
             grid_n: int = 160, samples_n: int = 2048) -> End:
    """Minimal-length sub-arc of the long arc (t1, t2) forming an end.

    An end spans a full diameter, bulges at least the rolling radius past
    its chord, and encloses no essential pair.  A start-parameter grid with
    chord root-finding over dense samples proposes candidates; the best one
    is polished by local halving steps.
    """
    eps = loop.tol.eps_geom
    r = loop.radius
    two_r = 2.0 * r
    d = loop.forward(t1, t2)
    if not classify_subcurve(loop, t1, t2).is_long:
        raise SearchFailed("find_end requires a long input sub-curve")
    raw = _essential_raw(loop, sweep_n)
    offs = np.linspace(0.0, d, samples_n)
    pts = loop.points_at(t1 + offs)
    px = pts[:, 0]
    py = pts[:, 1]

    def chord_at(g: float, x: float) -> float:
        pa = loop.point_at(loop.wrap(t1 + g))
        return pa.distance(loop.point_at(loop.wrap(t1 + x))) - two_r

    touch_tol = max(10.0 * eps, 1e-12 * r)

    def best_from(g: float, cap: float) -> Optional[tuple]:
        # minimal valid (length, b_off) for a fixed start offset
        if d - g < two_r - eps:
            return None
        pa = loop.point_at(loop.wrap(t1 + g))
        dist = np.hypot(px - pa.x, py - pa.y) - two_r
        start = int(np.searchsorted(offs, g))
        sign = np.signbit(dist)
        flips = np.nonzero(sign[start:-1] != sign[start + 1:])[0] + start
        roots = []
        for k in flips:
            lo, hi = float(offs[k]), float(offs[k + 1])
            if hi <= g:
                continue
            lo = max(lo, g)
            flo = chord_at(g, lo)
            fhi = chord_at(g, hi)
            if flo == 0.0:
                roots.append(lo)
                continue
            if flo * fhi > 0.0:
                continue
            for _ in range(64):
                mid = 0.5 * (lo + hi)
                fm = chord_at(g, mid)
                if flo * fm <= 0.0:
                    hi, fhi = mid, fm
                else:
                    lo, flo = mid, fm
                if hi - lo <= 1e-13 * max(loop.length, 1.0):
                    break
            roots.append(0.5 * (lo + hi))
        # tangential touches: interior maxima grazing the diameter from below
        inner = dist[start + 1:-1]
        if len(inner):
            peak = ((inner >= dist[start:-2]) & (inner >= dist[start + 2:])
                    & (np.abs(inner) <= touch_tol))
            for k in np.nonzero(peak)[0] + start + 1:
                lo, hi = float(offs[k - 1]), float(offs[k + 1])
                lo = max(lo, g)
                for _ in range(80):  # ternary maximization of the chord
                    m1 = lo + (hi - lo) / 3.0
                    m2 = hi - (hi - lo) / 3.0
                    if chord_at(g, m1) < chord_at(g, m2):
                        lo = m1
                    else:
                        hi = m2
                b = 0.5 * (lo + hi)
                if abs(chord_at(g, b)) <= touch_tol:
                    roots.append(b)
        roots.sort()
        last = -math.inf
        for root in roots:
            if root - last <= 1e-12 * max(loop.length, 1.0):
                continue
            last = root
            length = root - g
            if length >= cap:
                return None  # later roots are only longer
            if length >= two_r - eps and _end_candidate_ok(loop, t1, g,
                                                           root, raw):
                return (length, root)
        return None

    grid = np.linspace(0.0, d, grid_n, endpoint=False)
    junctions = np.array([off for off, _p in
                          _subcurve_with_offsets(loop, t1, t2)])
    for attempt, gvals in enumerate((np.unique(np.concatenate([grid,
                                                               junctions])),
                                     np.linspace(0.0, d, grid_n * 8,
                                                 endpoint=False))):
        best = None
        for g in gvals:
            cap = best[0] - 1e-15 if best is not None else math.inf
            got = best_from(float(g), cap)
            if got is not None and (best is None or got[0] < best[0]):
                best = (got[0], float(g), got[1])
        if best is not None:
            break
    if best is None:
        raise SearchFailed("no valid end candidate on the search grid")

    length, g, b_off = best
    step = d / grid_n * 0.5
    floor = max(loop.tol.eps_param * 0.5, 1e-12 * loop.length)
    while step > floor:
        moved = False
        for ng in (g - step, g + step):
            if ng < 0.0 or d - ng < two_r - eps:
                continue
            got = best_from(ng, length)
            if got is not None and got[0] < length:
                length, g, b_off = got[0], ng, got[1]
                moved = True
                break
        if not moved:
            step *= 0.5

    a = loop.wrap(t1 + g)
    b = loop.wrap(t1 + b_off)
    pa = loop.point_at(a)
    pb = loop.point_at(b)
    if abs(pa.distance(pb) - two_r) > touch_tol:
        raise SearchFailed("end chord drifted off the diameter")
    if length < math.pi * r - max(eps, 1e-6 * r):
        raise SearchFailed("end candidate shorter than half a turn")
    circle = Disk((pa + pb) * 0.5, r)
    essential = _end_is_essential(loop, a, b, raw)
    return End(t1=a, t2=b, circle=circle, length=length, essential=essential)


# ---------------------------------------------------------------------------
# half disks


def _half_disk_grid(hd: HalfDisk, samples: int) -> np.ndarray:
    """Deterministic sample points of the half disk, biased to its boundary."""
    R = hd.radius
    edge = (1e-7, 1e-5, 1e-3, 1e-2, 0.05)
    n_line = max(32, int(math.sqrt(samples)))
    xs = []
    ys = []
    for gam in edge:
        rho = R * (1.0 - gam)
        phi = np.linspace(gam, math.pi - gam, n_line)
        xs.append(rho * np.cos(phi))
        ys.append(rho * np.sin(phi))
    for gam in edge:
        y = R * gam
        xm = math.sqrt(max(R * R - y * y, 0.0)) * (1.0 - 1e-7)
        xs.append(np.linspace(-xm, xm, n_line))
        ys.append(np.full(n_line, y))
    n_bulk = max(8, int(math.sqrt(max(samples - 10 * n_line, 1))) + 1)
    fr = (np.arange(n_bulk) + 0.5) / n_bulk
    rho = R * np.sqrt(fr)
    phi = math.pi * (np.arange(n_bulk) + 0.5) / n_bulk
    pr, pp = np.meshgrid(rho, phi)
    xs.append((pr * np.cos(pp)).ravel())
    ys.append((pr * np.sin(pp)).ravel())
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    ex = hd.along
    ey = hd.toward
    out = np.empty((len(x), 2))
    out[:, 0] = hd.center.x + ex.x * x + ey.x * y
    out[:, 1] = hd.center.y + ex.y * x + ey.y * y
    return out


def half_disk(loop: Loop, end: End, samples: int = 1024,
              verify: bool = True) -> HalfDisk:
    """Half disk on the bulge side of the end chord, with containment check.

    The verification casts winding-number tests over a boundary-biased grid
    of at least `samples` points against the closed chain formed by the end
    sub-curve and its chord.  A sample with winding zero raises
    ContainmentViolated with the offending point.
    """
    h_plus, h_minus, n = _chord_heights(loop, end.t1, end.t2)
    toward = n if h_plus >= h_minus else n * -1.0
    hd = HalfDisk(center=end.circle.center, radius=loop.radius,
                  toward=toward)
    if not verify:
        return hd
    pts = _half_disk_grid(hd, samples)
    p = loop.point_at(end.t1)
    q = loop.point_at(end.t2)
    chain = loop.subcurve(end.t1, end.t2)
    chain.append(Segment(q, p))
    near = min_distances(pts, chain) <= loop.tol.eps_geom
    inner = pts[~near]
    if not len(inner):
        return hd
    wn = winding_numbers(inner, chain)
    bad = np.nonzero(wn == 0)[0]
    if len(bad):
        wx, wy = inner[bad[0]]
        raise ContainmentViolated(
            f"half-disk sample ({wx!r}, {wy!r}) escapes the end region "
            f"({len(bad)} of {len(pts)} samples outside)")
    return hd


# ---------------------------------------------------------------------------
# parallel tangents


def _turning_profile(loop: Loop, t1: float, t2: float) -> tuple:
    """Breakpoints, cumulative tangent angles, and slopes over a sub-curve."""
    sub = _subcurve_with_offsets(loop, t1, t2)
    bps = [0.0]
    ths = [loop.tangent_at(t1).angle()]
    slopes = []
    for off, piece in sub:
        turn = piece.sweep if isinstance(piece, Arc) else 0.0
        slopes.append(turn / piece.length)
        bps.append(off + piece.length)
        ths.append(ths[-1] + turn)
    return bps, ths, slopes


def find_parallel_tangents(loop: Loop, t1: float, t2: float,
                           sweep_n: int = SWEEP_N) -> tuple:
    """Opposite-tangent pair inside the end of a long arc, plus its chord.

    The tangent angle is piecewise linear in arc length, so roots of
    theta(b) = theta(a) + odd multiple of pi are exact per piece.  Returns
    (ParallelTangentPair, CrossSection); the cross section is the end chord
    and spans the full diameter.
    """
    end = find_end(loop, t1, t2, sweep_n=sweep_n)
    bps, ths, slopes = _turning_profile(loop, end.t1, end.t2)
    tiny = max(loop.tol.eps_param, 1e-12 * loop.length)
    # recovered ends can fall ~2e-7 short of a full half turn, leaving the
    # exact odd-pi root just outside the interval; admit that much slack
    ang_tol = 1e-6

    def theta(x: float) -> float:
        i = min(max(np.searchsorted(bps, x, side="right") - 1, 0),
                len(slopes) - 1)
        return ths[i] + slopes[i] * (x - bps[i])

    cands = set()
    for i, slope in enumerate(slopes):
        span = bps[i + 1] - bps[i]
        parts = max(1, int(abs(slope) * span / (math.pi / 16.0)) + 1)
        for k in range(parts):
            cands.add(bps[i] + span * k / parts)
    for a in sorted(cands):
        base = theta(a)
        for i, slope in enumerate(slopes):
            lo = max(bps[i], a)
            hi = bps[i + 1]
            if hi <= a + tiny:
                continue
            v0 = theta(lo)
            v1 = ths[i + 1]
            vmin, vmax = min(v0, v1), max(v0, v1)
            if slope == 0.0:
                m = round((v0 - base) / math.pi)
                if m % 2 != 0 and abs(v0 - base - m * math.pi) <= ang_tol:
                    b = 0.5 * (lo + hi)
                    if b > a + tiny:
                        return _tangent_pair(loop, end, a, b)
                continue
            m_lo = math.ceil((vmin - base - ang_tol) / math.pi)
            m_hi = math.floor((vmax - base + ang_tol) / math.pi)
            for m in range(m_lo, m_hi + 1):
                if m % 2 == 0:
                    continue
                b = min(max(lo + (base + m * math.pi - v0) / slope, lo), hi)
                if b > a + tiny:
                    return _tangent_pair(loop, end, a, b)
    raise SearchFailed("no opposite-tangent pair inside the end")


def _tangent_pair(loop: Loop, end: End, a_off: float, b_off: float) -> tuple:
    ta = loop.wrap(end.t1 + a_off)
    tb = loop.wrap(end.t1 + b_off)
    p = loop.point_at(end.t1)
    q = loop.point_at(end.t2)
    pair = ParallelTangentPair(t1=ta, t2=tb, direction=loop.tangent_at(ta))
    section = CrossSection(a=p, b=q, length=p.distance(q),
                           t1=end.t1, t2=end.t2)
    return pair, section


# ---------------------------------------------------------------------------
# nonconvexity certificate


def _angles_close_mod_pi(a: float, b: float, tol: float) -> bool:
    d = math.fmod(a - b, math.pi)
    if d < 0.0:
        d += math.pi
    return d <= tol or math.pi - d <= tol


def nonconvexity_witness(loop: Loop,
                         n_directions: int = 64) -> Optional[tuple]:
    """Three parameters whose tangent lines are parallel yet distinct.

    A convex loop has exactly two tangent lines per direction, so three
    certify nonconvexity.  Concave-arc tangent directions are tried first,
    then a uniform fan; returns None when no direction resolves three
    distinct lines (is_convex stays the decision procedure).
    """
    r = loop.radius
    sep = 1e-6 * r
    starts = loop.junction_params()
    dirs = []
    for start, piece in zip(starts, loop.pieces):
        if isinstance(piece, Arc) and piece.signed_curvature > 0.0:
            dirs.append(loop.tangent_at(start + 0.5 * piece.length).angle())
    dirs.extend(math.pi * k / n_directions for k in range(n_directions))
    for theta in dirs:
        nrm = Point(-math.sin(theta), math.cos(theta))
        events = []
        for start, piece in zip(starts, loop.pieces):
            if isinstance(piece, Segment):
                if _angles_close_mod_pi(piece.direction.angle(), theta, 1e-9):
                    events.append((piece.start.dot(nrm),
                                   start + 0.5 * piece.length))
                continue
            for phi in (theta + math.pi / 2.0, theta - math.pi / 2.0):
                s = arc_offset_of_angle(piece, phi)
                if s is not None:
                    events.append((piece.point_at(s).dot(nrm), start + s))
        events.sort()
        groups = []
        for off, param in events:
            if groups and off - groups[-1][0] <= sep:
                groups[-1] = (off, min(groups[-1][1], param))
                continue
            groups.append((off, param))
        if len(groups) >= 3:
            picks = (groups[0][1], groups[len(groups) // 2][1], groups[-1][1])
            return tuple(sorted(loop.wrap(p) for p in picks))
    return None
