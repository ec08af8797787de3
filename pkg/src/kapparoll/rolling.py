"""Tangent-disk fit tests and whole-domain rolling classification.

A domain rolls internally when every boundary point admits a radius-r
disk tangent there and contained in the closed domain; externally when
the complement admits the same.  Two independent deciders are provided:
the direct sampled tangent-disk test and the essential-terminal
criterion.  They must agree; disagreement is a hard error.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .classify import SWEEP_N, TerminalPair, find_essential_pairs
from .config import worker_count
from .errors import MethodDisagreement
from .geometry import (
    Arc,
    Disk,
    Point,
    Segment,
    circle_piece_intersections,
    closest_on_piece,
    min_distances,
    pieces_bbox,
    winding_numbers,
)
from .loop import Loop


class Side(enum.Enum):
    INTERNAL = "internal"
    EXTERNAL = "external"


class ContactKind(enum.Enum):
    SINGLETON = "singleton"
    ANTIPODAL_PAIR = "antipodal_pair"
    BOUNDARY_ARC = "boundary_arc"
    TRANSVERSAL = "transversal"


@dataclass(frozen=True)
class ContactClass:
    """Contact set of a tangent disk with the loop.

    For fitting disks the kind is singleton, antipodal pair, or boundary
    arc; transversal carries the crossing points of a disk that does not
    fit.
    """

    kind: ContactKind
    points: tuple

    def __post_init__(self):
        if self.kind is ContactKind.TRANSVERSAL and not self.points:
            raise ValueError("transversal contact requires crossing points")


class EnclosureSide(enum.Enum):
    INTERNAL_ENCLOSURE = "internal"
    EXTERNAL_ENCLOSURE = "external"
    MIXED = "mixed"


class Method(enum.Enum):
    DIRECT = "direct"
    TERMINAL = "terminal"
    BOTH = "both"


@dataclass(frozen=True)
class Failure:
    t: float
    side: Side
    obstruction: object  # ContactClass or TerminalPair


@dataclass(frozen=True)
class RollingReport:
    internal: bool
    external: bool
    rolling: bool
    failures: tuple
    method: Method


# ---------------------------------------------------------------------------
# tangent disks


def tangent_disk(loop: Loop, t: float, side: Side) -> Disk:
    """Radius-r disk tangent to the loop at t, offset to the given side."""
    n = loop.inward_normal_at(t)
    if side is Side.EXTERNAL:
        n = n * -1.0
    return Disk(loop.point_at(t) + n * loop.radius, loop.radius)


def _contact_points(loop: Loop, center: Point, r: float, band: float):
    """Contact evidence: (whole-arc contact?, touching points)."""
    arc_contact = False
    pts = []
    for piece in loop.pieces:
        if (isinstance(piece, Arc)
                and piece.center.distance(center) <= band
                and abs(piece.radius - r) <= band):
            arc_contact = True
            pts.append(piece.point_at(0.0))
            continue
        dist, s = closest_on_piece(center, piece)
        if abs(dist - r) <= band:
            pts.append(piece.point_at(s))
    merged = []
    for p in pts:
        if all(p.distance(q) > max(band, 1e-7 * r) for q in merged):
            merged.append(p)
    return arc_contact, merged


def disk_fits(loop: Loop, d: Disk, side: Side) -> tuple:
    """Whether d lies in the closed region on the given side.

    Decided by the center's winding side plus closed-form clearance to
    every piece.  Returns (fits, ContactClass); for non-fitting disks the
    contact class carries the transversal crossings.
    """
    eps = loop.tol.eps_geom
    r = d.radius
    c = d.center
    clearance = loop.min_distance(c)
    if clearance <= eps:
        on_side = False
    else:
        want = "interior" if side is Side.INTERNAL else "exterior"
        on_side = loop.side_of(c) == want
    fits = on_side and clearance >= r - eps

    band = max(10.0 * eps, 1e-9 * r)
    if fits:
        arc_contact, pts = _contact_points(loop, c, r, band)
        if arc_contact:
            kind = ContactKind.BOUNDARY_ARC
        elif len(pts) == 1:
            kind = ContactKind.SINGLETON
        elif len(pts) == 2 and ((pts[0] - c) + (pts[1] - c)).norm <= 1e-6 * r:
            kind = ContactKind.ANTIPODAL_PAIR
        else:
            # fitting disks cannot touch elsewhere; flag for the invariant
            kind = ContactKind.TRANSVERSAL
        return True, ContactClass(kind, tuple(pts))

    crossings = []
    for piece in loop.pieces:
        for _s, p, kind_tag in circle_piece_intersections(c, r, piece):
            if kind_tag == "transversal":
                crossings.append(p)
    merged = []
    for p in crossings:
        if all(p.distance(q) > band for q in merged):
            merged.append(p)
    if not merged:
        # no boundary crossing: report the deepest intrusion instead
        dist, tpar = loop.closest_param(c)
        merged = [loop.point_at(tpar)]
    return False, ContactClass(ContactKind.TRANSVERSAL, tuple(merged))


# ---------------------------------------------------------------------------
# enclosure of a long arc


def _chain_bbox_grid(chain, n: int) -> np.ndarray:
    x0, y0, x1, y1 = pieces_bbox(chain)
    k = max(8, int(math.sqrt(n)))
    xs = np.linspace(x0, x1, k + 2)[1:-1]
    ys = np.linspace(y0, y1, k + 2)[1:-1]
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def arc_enclosure(loop: Loop, t1: float, t2: float,
                  samples: int = 1024) -> EnclosureSide:
    """Side of the domain filled by the region of (sub-curve + chord).

    Interior points of the region are sampled on a grid and classified
    against the loop; margins shrink adaptively so thin regions still get
    enough classified points.
    """
    sub = loop.subcurve(t1, t2)
    chain = list(sub) + [Segment(loop.point_at(t2), loop.point_at(t1))]
    pts = _chain_bbox_grid(chain, samples)
    r = loop.radius
    inside_any = False
    outside_any = False
    for margin in (0.05 * r, 0.01 * r, 2e-3 * r, 1e-5 * r):
        clear = min_distances(pts, chain) > margin
        cand = pts[clear]
        if not len(cand):
            continue
        wn = winding_numbers(cand, chain)
        cand = cand[wn != 0]
        if not len(cand):
            continue
        loop_clear = min_distances(cand, loop.pieces) > margin
        cand = cand[loop_clear]
        if len(cand) < 16 and margin > 1e-5 * r:
            continue
        if not len(cand):
            continue
        wn_loop = winding_numbers(cand, loop.pieces)
        inside_any = bool((wn_loop == -1).any())
        outside_any = bool((wn_loop == 0).any())
        break
    if inside_any and not outside_any:
        return EnclosureSide.INTERNAL_ENCLOSURE
    if outside_any and not inside_any:
        return EnclosureSide.EXTERNAL_ENCLOSURE
    return EnclosureSide.MIXED


def enclosure_side(loop: Loop, pair: TerminalPair,
                   arc: str = "auto") -> EnclosureSide:
    """Enclosure verdict for a pair's long arc.

    arc picks the sub-curve: "12", "21", or "auto" (the long side; with
    both long, the shared verdict, or mixed when the two disagree).
    """
    if arc == "12":
        return arc_enclosure(loop, pair.t1, pair.t2)
    if arc == "21":
        return arc_enclosure(loop, pair.t2, pair.t1)
    verdicts = []
    if pair.class_12.is_long:
        verdicts.append(arc_enclosure(loop, pair.t1, pair.t2))
    if pair.class_21.is_long:
        verdicts.append(arc_enclosure(loop, pair.t2, pair.t1))
    if not verdicts:
        raise ValueError("enclosure_side needs a long side")
    if all(v == verdicts[0] for v in verdicts):
        return verdicts[0]
    return EnclosureSide.MIXED


# ---------------------------------------------------------------------------
# whole-domain classification


def _direct_params(loop: Loop, density: Optional[int]) -> np.ndarray:
    n = density or max(4096, math.ceil(loop.length / (loop.radius / 64.0)))
    ts = np.linspace(0.0, loop.length, n, endpoint=False)
    return np.unique(np.concatenate([ts, np.array(loop.junction_params())]))


def _fit_mask(loop: Loop, ts: np.ndarray, side: Side) -> np.ndarray:
    """Vectorized tangent-disk fit over parameter samples."""
    r = loop.radius
    eps = loop.tol.eps_geom
    pts = loop.points_at(ts)
    tans = loop.tangents_at(ts)
    normals = np.column_stack([tans[:, 1], -tans[:, 0]])  # inward
    if side is Side.EXTERNAL:
        normals = -normals
    centers = pts + r * normals

    def block(chunk: np.ndarray) -> np.ndarray:
        ok = min_distances(chunk, loop.pieces) >= r - eps
        good = np.zeros(len(chunk), dtype=bool)
        if ok.any():
            wn = winding_numbers(chunk[ok], loop.pieces)
            want = -1 if side is Side.INTERNAL else 0
            good[np.nonzero(ok)[0]] = wn == want
        return good

    workers = worker_count()
    if workers <= 1 or len(centers) < 2048:
        return block(centers)
    chunks = np.array_split(centers, workers * 4)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(block, chunks))
    return np.concatenate(parts)


def _failure_runs(ts: np.ndarray, bad: np.ndarray, length: float) -> list:
    """Contiguous failing runs as (t_lo, t_hi) with cyclic wrap."""
    idx = np.nonzero(bad)[0]
    if not len(idx):
        return []
    runs = []
    start = prev = idx[0]
    for k in idx[1:]:
        if k == prev + 1:
            prev = k
            continue
        runs.append((ts[start], ts[prev]))
        start = prev = k
    runs.append((ts[start], ts[prev]))
    if len(runs) > 1 and bad[0] and bad[-1]:
        first = runs.pop(0)
        runs[-1] = (runs[-1][0], first[1] + length)
    return runs


def _refine_failure(loop: Loop, side: Side, lo: float, hi: float,
                    step: float) -> Failure:
    # re-verify at 4x density and report the deepest obstruction
    ts = np.arange(lo - step, hi + step + 1e-12, step / 4.0)
    mask = _fit_mask(loop, np.array([loop.wrap(t) for t in ts]), side)
    r = loop.radius
    worst = None
    for t, ok in zip(ts, mask):
        if ok:
            continue
        d = tangent_disk(loop, loop.wrap(t), side)
        clearance = loop.min_distance(d.center)
        if worst is None or clearance < worst[0]:
            worst = (clearance, loop.wrap(t))
    if worst is None:  # failure did not reproduce; keep the original locus
        worst = (r, loop.wrap(0.5 * (lo + hi)))
    t = worst[1]
    _fits, contact = disk_fits(loop, tangent_disk(loop, t, side), side)
    return Failure(t=t, side=side, obstruction=contact)


def _direct_verdict(loop: Loop, side: Side,
                    density: Optional[int]) -> tuple:
    ts = _direct_params(loop, density)
    mask = _fit_mask(loop, ts, side)
    bad = ~mask
    if not bad.any():
        return True, []
    step = loop.length / len(ts)
    failures = [_refine_failure(loop, side, lo, hi, step)
                for lo, hi in _failure_runs(ts, bad, loop.length)]
    return False, failures


def _terminal_verdict(loop: Loop, sweep_n: int) -> tuple:
    pairs = find_essential_pairs(loop, sweep_n=sweep_n)
    internal = True
    external = True
    failures = []
    for pair in pairs:
        v12 = arc_enclosure(loop, pair.t1, pair.t2)
        v21 = arc_enclosure(loop, pair.t2, pair.t1)
        if (v12 is EnclosureSide.INTERNAL_ENCLOSURE
                and v21 is EnclosureSide.INTERNAL_ENCLOSURE):
            internal = False
            failures.append(Failure(pair.t1, Side.INTERNAL, pair))
        # a bounded external pocket always has the unbounded far-field
        # component across the chord as its mate
        if (v12 is EnclosureSide.EXTERNAL_ENCLOSURE
                or v21 is EnclosureSide.EXTERNAL_ENCLOSURE):
            external = False
            failures.append(Failure(pair.t1, Side.EXTERNAL, pair))
    return internal, external, failures


def classify_domain(loop: Loop, method: Method = Method.BOTH,
                    density: Optional[int] = None,
                    sweep_n: int = SWEEP_N) -> RollingReport:
    """Internal/external/rolling verdicts for the whole domain.

    Direct samples tangent disks along the boundary; terminal reduces to
    essential pairs and their enclosures.  Both runs the two and raises
    MethodDisagreement when they differ, since they decide the same
    property.
    """
    if method is Method.DIRECT:
        internal, f_int = _direct_verdict(loop, Side.INTERNAL, density)
        external, f_ext = _direct_verdict(loop, Side.EXTERNAL, density)
        failures = f_int + f_ext
    elif method is Method.TERMINAL:
        internal, external, failures = _terminal_verdict(loop, sweep_n)
    else:
        d_int, f_dint = _direct_verdict(loop, Side.INTERNAL, density)
        d_ext, f_dext = _direct_verdict(loop, Side.EXTERNAL, density)
        t_int, t_ext, f_term = _terminal_verdict(loop, sweep_n)
        if d_int != t_int or d_ext != t_ext:
            raise MethodDisagreement(
                f"direct (internal={d_int}, external={d_ext}) vs terminal "
                f"(internal={t_int}, external={t_ext}); "
                f"direct failures at {[f.t for f in f_dint + f_dext]!r}, "
                f"terminal failures at {[f.t for f in f_term]!r}")
        internal, external = d_int, d_ext
        failures = f_dint + f_dext + f_term
    failures.sort(key=lambda f: (f.t, f.side.value))
    return RollingReport(internal=internal, external=external,
                         rolling=internal and external,
                         failures=tuple(failures), method=method)
