"""Randomized invariant checks over the fuzz corpus.

Hypothesis drives seeds and transform parameters; the loops themselves
come from the deterministic fuzz generator so every failure replays.
Margins: assertions avoid the tolerance gray zone by requiring sampled
margins clearly on one side (assume() drops borderline draws).
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from kapparoll.classify import (
    classify_subcurve,
    find_end,
    find_essential_pairs,
    find_long_arc,
    is_essential,
)
from kapparoll.errors import DegenerateChord, DegenerateInterval
from kapparoll.geometry import (
    Arc,
    Disk,
    Lens,
    Point,
    Segment,
    disks_through,
    lens_contains,
    piece_in_disk,
)
from kapparoll.loop import Loop
from kapparoll.rolling import Method, classify_domain
from kapparoll.shapes import circle, dumbbell, fuzz_loop, rectangle, stadium, wavy_blob

K = 1.0
R = 1.0 / K
EPS = 1e-9

loops_st = st.integers(min_value=0, max_value=199).map(
    lambda s: fuzz_loop(K, s))
angles_st = st.floats(min_value=-math.pi, max_value=math.pi,
                      allow_nan=False, allow_infinity=False)
coords_st = st.floats(min_value=-8.0, max_value=8.0,
                      allow_nan=False, allow_infinity=False)


def moved(loop: Loop, angle: float, shift: Point) -> Loop:
    ca, sa = math.cos(angle), math.sin(angle)

    def mv(p: Point) -> Point:
        return Point(ca * p.x - sa * p.y + shift.x,
                     sa * p.x + ca * p.y + shift.y)

    pieces = []
    for pc in loop.pieces:
        if isinstance(pc, Segment):
            pieces.append(Segment(mv(pc.start), mv(pc.end)))
        else:
            pieces.append(Arc(mv(pc.center), pc.radius,
                              pc.start_angle + angle, pc.sweep))
    return Loop(pieces, loop.kappa)


class TestPrimitives:
    @given(x1=coords_st, y1=coords_st, dx=angles_st, d=st.floats(
        min_value=0.05, max_value=1.95))
    @settings(max_examples=120, deadline=None)
    def test_disks_through_symmetry(self, x1, y1, dx, d):
        p = Point(x1, y1)
        q = Point(x1 + d * math.cos(dx), y1 + d * math.sin(dx))
        centers = disks_through(p, q, R, EPS)
        swapped = disks_through(q, p, R, EPS)
        assert len(centers) == 2
        key = lambda c: (round(c.x, 9), round(c.y, 9))
        assert sorted(map(key, centers)) == sorted(map(key, swapped))
        mid = Point((p.x + q.x) / 2.0, (p.y + q.y) / 2.0)
        c1, c2 = centers
        # mirror images across the chord: midpoint of centers is the
        # chord midpoint and both sit at distance r from each terminal
        assert (c1.x + c2.x) / 2.0 == pytest.approx(mid.x, abs=1e-9)
        assert (c1.y + c2.y) / 2.0 == pytest.approx(mid.y, abs=1e-9)
        for c in centers:
            assert c.distance(p) == pytest.approx(R, abs=1e-9)
            assert c.distance(q) == pytest.approx(R, abs=1e-9)

    @given(cx=coords_st, cy=coords_st, rad=st.floats(min_value=0.3,
                                                     max_value=3.0),
           a0=angles_st, sweep=st.floats(min_value=-6.0, max_value=6.0),
           dcx=coords_st, dcy=coords_st,
           dr=st.floats(min_value=0.5, max_value=6.0))
    @settings(max_examples=150, deadline=None)
    def test_piece_in_disk_matches_sampling(self, cx, cy, rad, a0, sweep,
                                            dcx, dcy, dr):
        assume(abs(sweep) > 1e-3)
        piece = Arc(Point(cx, cy), rad, a0, sweep)
        disk = Disk(Point(dcx, dcy), dr)
        s = np.linspace(0.0, piece.length, 1000)
        pts = np.array([piece.point_at(v) for v in s])
        worst = float(np.hypot(pts[:, 0] - dcx, pts[:, 1] - dcy).max())
        assume(abs(worst - dr) > 1e-6)
        assert piece_in_disk(piece, disk) == (worst < dr)

    @given(x1=coords_st, y1=coords_st, d=st.floats(min_value=0.1,
                                                   max_value=1.9),
           dirn=angles_st, px=coords_st, py=coords_st, rot=angles_st,
           tx=coords_st, ty=coords_st)
    @settings(max_examples=150, deadline=None)
    def test_lens_contains_rigid_invariance(self, x1, y1, d, dirn, px, py,
                                            rot, tx, ty):
        p = Point(x1, y1)
        q = Point(x1 + d * math.cos(dirn), y1 + d * math.sin(dirn))
        c1, c2 = disks_through(p, q, R, EPS)
        lens = Lens(Disk(c1, R), Disk(c2, R), p, q)
        x = Point(px, py)
        margin = max(abs(c1.distance(x) - R), abs(c2.distance(x) - R))
        assume(margin > 1e-6)
        before = lens_contains(lens, x, EPS)
        ca, sa = math.cos(rot), math.sin(rot)
        mv = lambda pt: Point(ca * pt.x - sa * pt.y + tx,
                              sa * pt.x + ca * pt.y + ty)
        lens2 = Lens(Disk(mv(c1), R), Disk(mv(c2), R), mv(p), mv(q))
        assert lens_contains(lens2, mv(x), EPS) == before


class TestLoopInvariants:
    @given(loop=loops_st)
    @settings(max_examples=40, deadline=None)
    def test_winding_inside_and_far(self, loop):
        assert loop.winding(Point(0.0, 0.0), check=False) == -1
        assert loop.winding(Point(1e4, 2e4), check=False) == 0

    @given(loop=loops_st)
    @settings(max_examples=60, deadline=None)
    def test_length_bound(self, loop):
        assert loop.length >= 2.0 * math.pi * loop.radius - loop.tol.eps_geom

    @given(loop=loops_st, t=st.floats(min_value=0.0, max_value=100.0))
    @settings(max_examples=60, deadline=None)
    def test_cyclic_wrap(self, loop, t):
        a = loop.point_at(t)
        b = loop.point_at(t + loop.length)
        assert a.distance(b) <= loop.tol.eps_geom

    @given(loop=loops_st, t1=st.floats(min_value=0.0, max_value=50.0),
           dt=st.floats(min_value=1e-3, max_value=20.0))
    @settings(max_examples=80, deadline=None)
    def test_chord_at_most_arc_length(self, loop, t1, dt):
        span = min(dt, loop.length * 0.999)
        a = loop.point_at(t1)
        b = loop.point_at(t1 + span)
        assert a.distance(b) <= span + loop.tol.eps_geom

    @given(loop=loops_st, angle=angles_st, tx=coords_st, ty=coords_st,
           t=st.floats(min_value=0.0, max_value=40.0))
    @settings(max_examples=60, deadline=None)
    def test_rigid_motion_equivariance(self, loop, angle, tx, ty, t):
        other = moved(loop, angle, Point(tx, ty))
        assert other.length == pytest.approx(loop.length, rel=1e-12)
        p = loop.point_at(t)
        ca, sa = math.cos(angle), math.sin(angle)
        expect = Point(ca * p.x - sa * p.y + tx, sa * p.x + ca * p.y + ty)
        assert other.point_at(t).distance(expect) < 1e-9

    @given(loop=loops_st, s=st.floats(min_value=0.2, max_value=5.0))
    @settings(max_examples=40, deadline=None)
    def test_scaling_covariance(self, loop, s):
        pieces = []
        for pc in loop.pieces:
            if isinstance(pc, Segment):
                pieces.append(Segment(Point(pc.start.x * s, pc.start.y * s),
                                      Point(pc.end.x * s, pc.end.y * s)))
            else:
                pieces.append(Arc(Point(pc.center.x * s, pc.center.y * s),
                                  pc.radius * s, pc.start_angle, pc.sweep))
        scaled = Loop(pieces, loop.kappa / s)
        assert scaled.length == pytest.approx(loop.length * s, rel=1e-12)

    @given(loop=loops_st, factor=st.floats(min_value=1.0, max_value=4.0))
    @settings(max_examples=40, deadline=None)
    def test_valid_at_larger_kappa(self, loop, factor):
        again = Loop(loop.pieces, loop.kappa * factor)
        assert again.length == loop.length


class TestClassificationInvariants:
    @given(loop=loops_st, t1=st.floats(min_value=0.0, max_value=40.0),
           dt=st.floats(min_value=0.05, max_value=30.0))
    @settings(max_examples=150, deadline=None)
    def test_exclusivity(self, loop, t1, dt):
        t2 = t1 + min(dt, 0.98 * loop.length)
        try:
            verdict = classify_subcurve(loop, loop.wrap(t1), loop.wrap(t2))
        except (DegenerateChord, DegenerateInterval):
            assume(False)
        assert not (verdict.is_short and verdict.is_long)

    @given(t1=st.floats(min_value=0.0, max_value=22.0),
           dt=st.floats(min_value=0.5, max_value=21.0))
    @settings(max_examples=60, deadline=None)
    def test_essential_symmetric(self, t1, dt):
        loop = dumbbell(K)
        t2 = loop.wrap(t1 + dt)
        try:
            fwd = is_essential(loop, loop.wrap(t1), t2)
            bwd = is_essential(loop, t2, loop.wrap(t1))
        except (DegenerateChord, DegenerateInterval):
            assume(False)
        assert fwd.essential == bwd.essential

    @given(angle=angles_st, tx=coords_st, ty=coords_st)
    @settings(max_examples=25, deadline=None)
    def test_essential_rigid_invariance(self, angle, tx, ty):
        loop = dumbbell(K)
        other = moved(loop, angle, Point(tx, ty))
        a = is_essential(loop, 2.9, 17.7).essential
        b = is_essential(other, 2.9, 17.7).essential
        assert a and b

    @given(loop=loops_st)
    @settings(max_examples=30, deadline=None)
    def test_convex_has_no_essential_pairs(self, loop):
        assume(loop.is_convex())
        assert find_essential_pairs(loop) == []

    def test_convex_corpus_has_no_essential_pairs(self):
        for loop in (circle(K, radius_factor=2.0), stadium(K),
                     rectangle(K, 4.0, 3.0)):
            assert loop.is_convex()
            assert find_essential_pairs(loop) == []

    @pytest.mark.parametrize("maker", [stadium, wavy_blob],
                             ids=["stadium", "wavy"])
    def test_rolling_monotone_in_radius(self, maker):
        loop = maker(K)
        report = classify_domain(loop, method=Method.DIRECT)
        assert report.rolling
        smaller = Loop(loop.pieces, 2.0 * K)
        again = classify_domain(smaller, method=Method.DIRECT)
        assert again.rolling

    def test_length_chain(self):
        for loop in (dumbbell(K), wavy_blob(K), fuzz_loop(K, 11)):
            t1, t2 = find_long_arc(loop)
            long_len = loop.forward(t1, t2)
            end = find_end(loop, t1, t2)
            eps = loop.tol.eps_geom
            assert loop.length >= long_len - eps
            assert long_len >= end.length - eps
            assert end.length >= 2.0 * loop.radius - eps
            p = loop.point_at(end.t1)
            q = loop.point_at(end.t2)
            assert p.distance(q) == pytest.approx(2.0 * loop.radius,
                                                  abs=1e-6)


def band_excess(loop, t1, t2, n=400):
    """Worst escape past the far circle for an in-band sub-curve.

    Returns None when the draw is out of scope: chord not clearly below
    2r, or the sub-curve leaves the band between the terminal
    perpendiculars.
    """
    r = loop.radius
    d = loop.forward(t1, t2)
    offs = np.linspace(0.0, d, n)
    pts = loop.points_at(loop.wrap(t1) + offs)
    p, q = pts[0], pts[-1]
    chord = math.hypot(q[0] - p[0], q[1] - p[1])
    if chord >= 1.998 * r or chord < 0.05 * r:
        return None
    u = (q - p) / chord
    nvec = np.array([-u[1], u[0]])
    along = (pts - p) @ u
    if along.min() < -1e-9 or along.max() > chord + 1e-9:
        return None
    h = math.sqrt(r * r - chord * chord / 4.0)
    mid = (p + q) / 2.0
    cplus = mid + nvec * h
    cminus = mid - nvec * h
    s = (pts - p) @ nvec
    dplus = np.hypot(*(pts - cplus).T)
    dminus = np.hypot(*(pts - cminus).T)
    worst = 0.0
    above = s > 1e-9
    below = s < -1e-9
    if above.any():
        worst = max(worst, float((dminus[above] - r).max()))
    if below.any():
        worst = max(worst, float((dplus[below] - r).max()))
    return worst


class TestBandLemma:
    @given(loop=loops_st, t1=st.floats(min_value=0.0, max_value=40.0),
           dt=st.floats(min_value=0.1, max_value=4.0))
    @settings(max_examples=250, deadline=None)
    def test_in_band_subcurve_stays_inside_far_circle(self, loop, t1, dt):
        w = band_excess(loop, t1, t1 + dt)
        assume(w is not None)
        assert w <= 1e-9
