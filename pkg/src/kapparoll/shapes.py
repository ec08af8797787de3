"""Builders for the loop shapes used across tests, demos, and fixtures.

Every builder takes the curvature bound kappa and expresses its trailing
size arguments in multiples of the disk radius r = 1/kappa, so a shape
scales rigidly with r.  All builders return validated clockwise Loops.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

from .errors import ValidationError
from .geometry import TWO_PI, Arc, Point, Segment, wrap_angle
from .loop import Loop


def circle(kappa: float, radius_factor: float = 1.0,
           center: tuple = (0.0, 0.0)) -> Loop:
    """Clockwise circle of radius radius_factor / kappa, four quarter arcs."""
    r = radius_factor / kappa
    c = Point(*center)
    pieces = [Arc(c, r, math.pi / 2 - k * math.pi / 2, -math.pi / 2)
              for k in range(4)]
    return Loop(pieces, kappa, metadata={"shape": "circle"})


def stadium(kappa: float, straight_factor: float = 2.0,
            cap_factor: float = 1.0, center: tuple = (0.0, 0.0)) -> Loop:
    """Two straight walls joined by half-circle caps."""
    r = cap_factor / kappa
    a = straight_factor / (2.0 * kappa)
    cx, cy = center
    pieces = [
        Segment(Point(cx - a, cy + r), Point(cx + a, cy + r)),
        Arc(Point(cx + a, cy), r, math.pi / 2, -math.pi),
        Segment(Point(cx + a, cy - r), Point(cx - a, cy - r)),
        Arc(Point(cx - a, cy), r, -math.pi / 2, -math.pi),
    ]
    return Loop(pieces, kappa, metadata={"shape": "stadium"})


def rounded_polygon(kappa: float, vertices: Sequence[tuple],
                    fillet_factor: float = 1.0,
                    fillet_factors: Optional[Sequence[float]] = None,
                    metadata: Optional[dict] = None) -> Loop:
    """Polygon with circular fillets at its corners.

    Vertices run clockwise (y up).  Convex corners become clockwise arcs,
    reflex corners counterclockwise ones; either way the fillet radius is
    fillet_factor / kappa (overridable per vertex via fillet_factors).
    """
    n = len(vertices)
    if n < 3:
        raise ValidationError("need at least three vertices")
    pts = [Point(*v) for v in vertices]
    radii = ([fillet_factor / kappa] * n if fillet_factors is None
             else [f / kappa for f in fillet_factors])
    corners = []
    for i in range(n):
        prev_pt = pts[(i - 1) % n]
        cur = pts[i]
        nxt = pts[(i + 1) % n]
        u = (cur - prev_pt).unit()
        w = (nxt - cur).unit()
        phi = wrap_angle(w.angle() - u.angle())
        if abs(phi) < 1e-12:
            corners.append(None)
            continue
        if abs(abs(phi) - math.pi) < 1e-9:
            raise ValidationError(f"vertex {i} doubles back on itself")
        rad = radii[i]
        setback = rad * math.tan(abs(phi) / 2.0)
        t1 = cur - u * setback
        t2 = cur + w * setback
        side = u.rot_ccw() if phi > 0 else u.rot_cw()
        c = t1 + side * rad
        corners.append((t1, t2, Arc(c, rad, (t1 - c).angle(), phi)))
    pieces = []
    for i in range(n):
        if corners[i] is None:
            continue
        _t1, t2, arc = corners[i]
        pieces.append(arc)
        j = (i + 1) % n
        while corners[j] is None:
            j = (j + 1) % n
        nxt_t1 = corners[j][0]
        gap = t2.distance(nxt_t1)
        if gap > 1e-12 / kappa:
            pieces.append(Segment(t2, nxt_t1))
    meta = {"shape": "rounded_polygon"}
    meta.update(metadata or {})
    return Loop(pieces, kappa, metadata=meta)


def rectangle(kappa: float, width_factor: float, height_factor: float,
              fillet_factor: float = 1.0, center: tuple = (0.0, 0.0)) -> Loop:
    """Axis-aligned rounded rectangle; outer size in multiples of r."""
    r = 1.0 / kappa
    w = width_factor * r / 2.0
    h = height_factor * r / 2.0
    cx, cy = center
    verts = [(cx - w, cy + h), (cx + w, cy + h), (cx + w, cy - h),
             (cx - w, cy - h)]
    loop = rounded_polygon(kappa, verts, fillet_factor=fillet_factor)
    loop.metadata["shape"] = "rectangle"
    return loop


def _ccw_sweep(a0: float, a1: float) -> float:
    s = wrap_angle(a1 - a0)
    return s + TWO_PI if s < 0 else s


def _cw_sweep(a0: float, a1: float) -> float:
    s = wrap_angle(a1 - a0)
    return s - TWO_PI if s > 0 else s


def _pocket_pieces(host_center: Point, host_radius: float, axis: Point,
                   width: float, mouth_fillet: float, cavity_radius: float,
                   cavity_fillet: float, wall_length: float) -> tuple:
    """Keyhole pocket carved into a circular host arc.

    Returns (entry_angle, exit_angle, pieces): the host-circle angles where
    the pocket replaces the host arc, and the boundary pieces from the
    entry tangency to the exit tangency walking clockwise (interior on the
    right).  The pocket is a cavity circle reachable only through a throat
    narrower than the cavity, so a disk wider than the throat cannot pass.
    The mouth and elbow corners are convex from the domain, the cavity rim
    concave; all radii must stay at or above the minimum turning radius.
    """
    ax = axis.unit()
    # local frame: +y along the axis, mouth at the top
    ey = ax
    ex = ax.rot_cw()

    def world(x: float, y: float) -> Point:
        return host_center + ex * x + ey * y

    rb = host_radius
    w2 = width / 2.0
    fm = mouth_fillet
    fc = cavity_fillet
    rc = cavity_radius
    if rc <= w2:
        raise ValidationError("cavity must be wider than the throat")
    under_m = (rb - fm) ** 2 - (w2 + fm) ** 2
    if under_m <= 0.0:
        raise ValidationError("mouth fillets do not fit on the host")
    ym = math.sqrt(under_m)  # mouth fillet centers sit at this height
    rise = math.sqrt((fc + rc) ** 2 - (fc + w2) ** 2)
    yf = ym - wall_length  # cavity fillet centers
    yc = yf - rise  # cavity center
    if yc - rc <= -rb:
        raise ValidationError("cavity pokes out of the host")

    def ang(p: Point, c: Point) -> float:
        return (p - c).angle()

    mouth_l = world(-(w2 + fm), ym)
    mouth_r = world(w2 + fm, ym)
    host_l = host_center + (mouth_l - host_center).unit() * rb
    host_r = host_center + (mouth_r - host_center).unit() * rb
    entry = ang(host_l, host_center)
    exit_ = ang(host_r, host_center)
    cav = world(0.0, yc)
    cfl = world(-(w2 + fc), yf)
    cfr = world(w2 + fc, yf)
    cav_l = cav + (cfl - cav).unit() * rc
    cav_r = cav + (cfr - cav).unit() * rc
    # local wall direction expressed as world angles
    a_east = ex.angle()   # +x of the local frame
    a_west = (ex * -1.0).angle()

    pieces = [
        # convex shoulder off the host rim into the left wall
        Arc(mouth_l, fm, ang(host_l, mouth_l),
            _cw_sweep(ang(host_l, mouth_l), a_east)),
        Segment(world(-w2, ym), world(-w2, yf)),
        # convex elbow onto the cavity rim
        Arc(cfl, fc, a_east, _cw_sweep(a_east, ang(cav_l, cfl))),
        # around the cavity the long way (concave from the domain)
        Arc(cav, rc, ang(cav_l, cav),
            _ccw_sweep(ang(cav_l, cav), ang(cav_r, cav))),
        Arc(cfr, fc, ang(cav_r, cfr), _cw_sweep(ang(cav_r, cfr), a_west)),
        Segment(world(w2, yf), world(w2, ym)),
        Arc(mouth_r, fm, a_west,
            _cw_sweep(a_west, ang(host_r, mouth_r))),
    ]
    return entry, exit_, pieces


def bitten_blob(kappa: float, blob_factor: float = 5.0,
                width_factor: float = 1.6, mouth_fillet_factor: float = 1.1,
                cavity_factor: float = 1.3, cavity_fillet_factor: float = 1.1,
                wall_factor: float = 0.45) -> Loop:
    """Round blob with a keyhole pocket biting in from the top.

    The pocket throat is narrower than 2r, so an external disk that enters
    the cavity cannot leave: external rolling fails while the internal
    side stays clear of the bite.
    """
    r = 1.0 / kappa
    rb = blob_factor * r
    c = Point(0.0, 0.0)
    entry, exit_, pocket = _pocket_pieces(
        c, rb, Point(0.0, 1.0), width_factor * r, mouth_fillet_factor * r,
        cavity_factor * r, cavity_fillet_factor * r, wall_factor * r)
    # host rim the long way around, clockwise from the pocket exit
    sweep = wrap_angle(entry - exit_)
    if sweep > 0:
        sweep -= TWO_PI
    host = Arc(c, rb, exit_, sweep)
    pieces = pocket + [host]
    return Loop(pieces, kappa, metadata={"shape": "bitten_blob"})


def bitten_dumbbell(kappa: float, **pocket_kw) -> Loop:
    """Dumbbell with a keyhole pocket in the right lobe's crown.

    Fails internal rolling at the neck and external rolling at the bite.
    """
    base = dumbbell(kappa, lobe_factor=3.0, separation_factor=5.0)
    r = 1.0 / kappa
    lobe_center = Point(*base.metadata["lobe_centers"][1])
    lobe = base.pieces[4]
    kw = dict(width_factor=1.5, mouth_fillet_factor=1.05,
              cavity_factor=1.25, cavity_fillet_factor=1.05,
              wall_factor=0.35)
    kw.update(pocket_kw)
    entry, exit_, pocket = _pocket_pieces(
        lobe_center, lobe.radius, Point(1.0, 0.0), kw["width_factor"] * r,
        kw["mouth_fillet_factor"] * r, kw["cavity_factor"] * r,
        kw["cavity_fillet_factor"] * r, kw["wall_factor"] * r)
    # split the lobe arc at the pocket tangencies (arc runs clockwise)
    a0 = lobe.start_angle
    sweep_pre = wrap_angle(entry - a0)
    if sweep_pre > 0:
        sweep_pre -= TWO_PI
    a_end = a0 + lobe.sweep
    sweep_post = wrap_angle(a_end - exit_)
    if sweep_post > 0:
        sweep_post -= TWO_PI
    if abs(sweep_pre) + abs(sweep_post) >= abs(lobe.sweep):
        raise ValidationError("pocket does not fit inside the lobe arc")
    pieces = (list(base.pieces[:4])
              + [Arc(lobe_center, lobe.radius, a0, sweep_pre)]
              + pocket
              + [Arc(lobe_center, lobe.radius, exit_, sweep_post)]
              + list(base.pieces[5:]))
    return Loop(pieces, kappa, metadata={"shape": "bitten_dumbbell"})


def trefoil_blob(kappa: float, lobe_factor: float = 2.0,
                 spread_factor: float = 1.7,
                 fillet_factor: float = 1.2) -> Loop:
    """Union of three overlapping round lobes with filleted armpits.

    Nonconvex but everywhere wider than 2r, so it rolls on both sides.
    """
    r = 1.0 / kappa
    R = lobe_factor * r
    rho = spread_factor * r
    f = fillet_factor * r
    # lobes listed in clockwise order so the walk runs clockwise
    angs = [math.pi / 2 - 2 * math.pi * k / 3 for k in range(3)]
    centers = [Point(rho * math.cos(a), rho * math.sin(a)) for a in angs]
    # armpit fillet between consecutive lobes: center equidistant R + f
    # from both lobe centers, out past the notch along the bisector
    fillets = {}
    for i in range(3):
        a_c = centers[i]
        b_c = centers[(i + 1) % 3]
        half = a_c.distance(b_c) / 2.0
        reach = (R + f) ** 2 - half ** 2
        if reach <= 0.0:
            raise ValidationError("lobes too far apart for the fillet")
        mid = (a_c + b_c) * 0.5
        fillets[i] = mid + mid.unit() * math.sqrt(reach)
    chain = []
    for i in range(3):
        c = centers[i]
        prev_f = fillets[(i - 1) % 3]  # armpit entered from
        next_f = fillets[i]  # armpit exited to
        a_in = (prev_f - c).angle()
        a_out = (next_f - c).angle()
        sweep = wrap_angle(a_out - a_in)
        if sweep > 0:
            sweep -= TWO_PI
        chain.append(Arc(c, R, a_in, sweep))
        # concave armpit arc from this lobe to the next, counterclockwise
        t_a = c + (next_f - c).unit() * R
        nxt = centers[(i + 1) % 3]
        t_b = nxt + (next_f - nxt).unit() * R
        f_a = (t_a - next_f).angle()
        f_b = (t_b - next_f).angle()
        fsweep = wrap_angle(f_b - f_a)
        if fsweep < 0:
            fsweep += TWO_PI
        chain.append(Arc(next_f, f, f_a, fsweep))
    return Loop(chain, kappa, metadata={"shape": "trefoil_blob"})


def wavy_blob(kappa: float, lobes: int = 6, base_factor: float = 5.0,
              amp_factor: float = 0.8, fillet_factor: float = 1.3) -> Loop:
    """Star-polygon blob with gentle concave dips; nonconvex, still wide."""
    r = 1.0 / kappa
    verts = []
    for k in range(2 * lobes):
        ang = math.pi / 2 - k * math.pi / lobes  # clockwise
        rad = (base_factor + (amp_factor if k % 2 == 0 else -amp_factor)) * r
        verts.append((rad * math.cos(ang), rad * math.sin(ang)))
    loop = rounded_polygon(kappa, verts, fillet_factor=fillet_factor)
    loop.metadata["shape"] = "wavy_blob"
    return loop


def clover(kappa: float, lobe_factor: float = 2.0,
           halfwidth_factor: float = 0.68, fillet_factor: float = 1.2,
           chamber_fillet_factor: float = 1.0,
           reach_factor: float = 4.6) -> Loop:
    """Three round lobes joined to a central chamber by sub-2r corridors.

    The chamber's inscribed disk (radius hw / cos30 + fch (1/cos30 - 1),
    bounded by the three chamber fillet arcs) stays under r, so no
    radius-r disk fits anywhere between the lobes: the internal rolling
    regions are exactly the three lobes.
    """
    r = 1.0 / kappa
    R = lobe_factor * r
    hw = halfwidth_factor * r
    fl = fillet_factor * r
    fch = chamber_fillet_factor * r
    A = reach_factor * r
    axes = [math.pi / 2, math.pi / 2 + 2 * math.pi / 3,
            math.pi / 2 + 4 * math.pi / 3]
    under = (R + fl) ** 2 - (hw + fl) ** 2
    if under <= 0.0:
        raise ValidationError("corridor too wide for the lobe fillets")
    y_outer = A - math.sqrt(under)  # wall's lobe-end coordinate on the axis

    def frame(j: int) -> tuple:
        u = Point(math.cos(axes[j]), math.sin(axes[j]))
        return u, u.rot_cw()  # axis, and its clockwise-normal (east side)

    # chamber fillet between the east wall of corridor j and the west wall
    # of the clockwise-adjacent corridor: tangent to both wall lines
    chamber = {}
    for j in range(3):
        k = (j - 1) % 3  # clockwise neighbour
        uj, ej = frame(j)
        uk, ek = frame(k)
        bis = (uj + uk).unit()
        # distance along the bisector where both wall-line offsets reach
        # hw + fch (walls: p . ej = hw for j-east, p . -ek = hw for k-west)
        denom = bis.dot(ej)
        t = (hw + fch) / denom
        c = bis * t
        foot_j = c - ej * fch
        foot_k = c + ek * fch
        chamber[(j, k)] = (c, foot_j, foot_k)

    pieces = []
    for j in (0, 2, 1):  # clockwise visiting order
        k = (j - 1) % 3
        uj, ej = frame(j)
        lobe_c = uj * A
        # lobe arc: from the west-wall tangency around the crown to the
        # east-wall tangency, clockwise
        f_east = ej * (hw + fl) + uj * y_outer
        f_west = ej * -(hw + fl) + uj * y_outer
        a_in = (f_west - lobe_c).angle()
        a_out = (f_east - lobe_c).angle()
        sweep = wrap_angle(a_out - a_in)
        if sweep > 0:
            sweep -= TWO_PI
        pieces.append(Arc(lobe_c, R, a_in, sweep))
        # east outer fillet: concave elbow from the lobe onto the wall
        t_lobe = lobe_c + (f_east - lobe_c).unit() * R
        e_start = (t_lobe - f_east).angle()
        e_end = (ej * hw + uj * y_outer - f_east).angle()
        esweep = wrap_angle(e_end - e_start)
        if esweep < 0:
            esweep += TWO_PI
        pieces.append(Arc(f_east, fl, e_start, esweep))
        # east wall from the lobe down to the chamber fillet
        c_f, foot_j, foot_k = chamber[(j, k)]
        pieces.append(Segment(ej * hw + uj * y_outer, foot_j))
        # chamber fillet onto the neighbour's west wall
        c_start = (foot_j - c_f).angle()
        c_end = (foot_k - c_f).angle()
        csweep = wrap_angle(c_end - c_start)
        if csweep < 0:
            csweep += TWO_PI
        pieces.append(Arc(c_f, fch, c_start, csweep))
        # neighbour's west wall from the chamber out to its lobe
        uk, ek = frame(k)
        f_west_k = ek * -(hw + fl) + uk * y_outer
        pieces.append(Segment(foot_k, ek * -hw + uk * y_outer))
        # neighbour's west outer fillet up onto the lobe
        t_lobe_k = uk * A + (f_west_k - uk * A).unit() * R
        w_start = (ek * -hw + uk * y_outer - f_west_k).angle()
        w_end = (t_lobe_k - f_west_k).angle()
        wsweep = wrap_angle(w_end - w_start)
        if wsweep < 0:
            wsweep += TWO_PI
        pieces.append(Arc(f_west_k, fl, w_start, wsweep))
    # rotate so each lobe's pieces run consecutively
    order = pieces[:]
    return Loop(order, kappa, metadata={
        "shape": "clover", "throat_width": 2 * hw,
        "lobe_centers": tuple((math.cos(a) * A, math.sin(a) * A)
                              for a in axes),
    })


def fuzz_loop(kappa: float, seed: int, max_tries: int = 64) -> Loop:
    """Deterministic random rounded polygon that validates as a loop.

    Vertices sit on a jittered star around the origin; fillets stay at or
    above the minimum radius.  The same seed always yields the same loop.
    """
    import numpy as np

    r = 1.0 / kappa
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        n = int(rng.integers(4, 9))
        base = rng.uniform(3.2, 5.5) * r
        amp = rng.uniform(0.0, 0.55) * base
        phase = rng.uniform(0.0, TWO_PI)
        verts = []
        for k in range(n):
            ang = phase - k * TWO_PI / n  # clockwise
            rad = base + amp * math.sin(3 * ang + phase)
            rad *= rng.uniform(0.88, 1.12)
            verts.append((rad * math.cos(ang), rad * math.sin(ang)))
        fillets = [float(rng.uniform(1.0, 2.2)) for _ in range(n)]
        try:
            loop = rounded_polygon(kappa, verts, fillet_factors=fillets)
        except (ValidationError, ValueError):
            continue
        loop.metadata["shape"] = f"fuzz_{seed}"
        return loop
    raise ValidationError(f"no valid fuzz loop for seed {seed}")


def dumbbell(kappa: float, lobe_factor: float = 2.0,
             halfwidth_factor: float = 0.8, fillet_factor: float = 1.2,
             separation_factor: float = 3.2) -> Loop:
    """Two round lobes joined by a straight corridor narrower than 2r.

    The corridor walls meet the lobes through concave fillets; with the
    default numbers the throat width is 1.6r, so a radius-r disk cannot
    pass between the lobes.
    """
    r = 1.0 / kappa
    R = lobe_factor * r
    hw = halfwidth_factor * r
    f = fillet_factor * r
    a = separation_factor * r
    under = (R + f) ** 2 - (hw + f) ** 2
    if under <= 0.0:
        raise ValidationError("corridor too wide for the fillets to reach the lobes")
    xf = -a + math.sqrt(under)
    if xf >= -1e-12 * r:
        raise ValidationError("lobes too close; fillet centers must stay left of x=0")
    theta = math.atan2(hw + f, xf + a)
    lc_left = Point(-a, 0.0)
    lc_right = Point(a, 0.0)
    sweep_f = math.pi / 2 - theta

    pieces = [
        # left lobe, top of crown to the upper fillet tangency
        Arc(lc_left, R, math.pi / 2, -(math.pi / 2 - theta)),
        # upper-left fillet down to the wall
        Arc(Point(xf, hw + f), f, theta + math.pi, sweep_f),
        Segment(Point(xf, hw), Point(-xf, hw)),
        # upper-right fillet up to the right lobe
        Arc(Point(-xf, hw + f), f, -math.pi / 2, sweep_f),
        # right lobe, all the way around
        Arc(lc_right, R, math.pi - theta, -(TWO_PI - 2 * theta)),
        # lower-right fillet to the wall
        Arc(Point(-xf, -(hw + f)), f, theta, sweep_f),
        Segment(Point(-xf, -hw), Point(xf, -hw)),
        # lower-left fillet and back around the left lobe
        Arc(Point(xf, -(hw + f)), f, math.pi / 2, sweep_f),
        Arc(lc_left, R, -theta, -(3 * math.pi / 2 - theta)),
    ]
    return Loop(pieces, kappa, metadata={
        "shape": "dumbbell", "throat_width": 2 * hw,
        "lobe_centers": ((-a, 0.0), (a, 0.0)),
    })
