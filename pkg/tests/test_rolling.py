"""Tangent-disk fits, whole-domain verdicts, and the raster referee."""
import math
import os

import numpy as np
import pytest

from kapparoll.classify import find_essential_pairs
from kapparoll.errors import ResolutionTooCoarse
from kapparoll.geometry import Arc, Point, Segment
from kapparoll.loop import Loop
from kapparoll.raster import (component_areas, distance_transform,
                              opening_components, oracle_rolling, rasterize,
                              write_pgm)
from kapparoll.rolling import (ContactClass, ContactKind, EnclosureSide,
                               Method, Side, arc_enclosure, classify_domain,
                               disk_fits, enclosure_side, tangent_disk)
from kapparoll.shapes import (bitten_blob, bitten_dumbbell, circle, clover,
                              dumbbell, rectangle, stadium, trefoil_blob,
                              wavy_blob)

KAPPA = 1.0
R = 1.0
SWEEP = 256

CIRCLE = circle(KAPPA, radius_factor=2.0)
UNIT_CIRCLE = circle(KAPPA)
STADIUM = stadium(KAPPA)
WIDE_STADIUM = stadium(KAPPA, cap_factor=1.25)
DUMBBELL = dumbbell(KAPPA)
BITTEN = bitten_blob(KAPPA)
BITTEN_DB = bitten_dumbbell(KAPPA)
TREFOIL = trefoil_blob(KAPPA)
WAVY = wavy_blob(KAPPA)
CLOVER = clover(KAPPA)

# (loop, internal rolls, external rolls)
CATEGORY_MATRIX = [
    ("circle", CIRCLE, True, True),
    ("stadium", STADIUM, True, True),
    ("trefoil", TREFOIL, True, True),
    ("wavy", WAVY, True, True),
    ("dumbbell", DUMBBELL, False, True),
    ("bitten_blob", BITTEN, True, False),
    ("bitten_dumbbell", BITTEN_DB, False, False),
    ("clover", CLOVER, False, True),
]


def rigid_motion(loop: Loop, angle: float = math.pi / 3,
                 shift: Point = Point(4.0, -6.0)) -> Loop:
    ca, sa = math.cos(angle), math.sin(angle)

    def move(p: Point) -> Point:
        return Point(ca * p.x - sa * p.y + shift.x,
                     sa * p.x + ca * p.y + shift.y)

    pieces = []
    for pc in loop.pieces:
        if isinstance(pc, Segment):
            pieces.append(Segment(move(pc.start), move(pc.end)))
        else:
            pieces.append(Arc(move(pc.center), pc.radius,
                              pc.start_angle + angle, pc.sweep))
    return Loop(pieces, loop.kappa)


class TestTangentDisk:
    def test_unit_circle_internal_is_inscribed(self):
        d = tangent_disk(UNIT_CIRCLE, 0.0, Side.INTERNAL)
        assert d.radius == pytest.approx(R)
        assert d.center.distance(Point(0.0, 0.0)) < 1e-12

    def test_unit_circle_external_sits_outside(self):
        d = tangent_disk(UNIT_CIRCLE, 0.0, Side.EXTERNAL)
        assert d.center.distance(Point(0.0, 2.0)) < 1e-12

    def test_stadium_side_centerline(self):
        d = tangent_disk(STADIUM, 1.0, Side.INTERNAL)
        assert d.center.distance(Point(0.0, 0.0)) < 1e-12


class TestDiskFits:
    def test_unit_circle_internal_full_boundary_contact(self):
        ok, cc = disk_fits(UNIT_CIRCLE,
                           tangent_disk(UNIT_CIRCLE, 0.0, Side.INTERNAL),
                           Side.INTERNAL)
        assert ok and cc.kind is ContactKind.BOUNDARY_ARC

    def test_unit_circle_external_single_touch(self):
        ok, cc = disk_fits(UNIT_CIRCLE,
                           tangent_disk(UNIT_CIRCLE, 0.0, Side.EXTERNAL),
                           Side.EXTERNAL)
        assert ok and cc.kind is ContactKind.SINGLETON
        assert cc.points[0].distance(Point(0.0, 1.0)) < 1e-9

    def test_stadium_side_touches_both_walls(self):
        ok, cc = disk_fits(STADIUM, tangent_disk(STADIUM, 1.0, Side.INTERNAL),
                           Side.INTERNAL)
        assert ok and cc.kind is ContactKind.ANTIPODAL_PAIR
        got = sorted((round(p.x, 9), round(p.y, 9)) for p in cc.points)
        assert got == [(0.0, -1.0), (0.0, 1.0)]

    def test_stadium_cap_boundary_arc(self):
        t_cap = 2.0 + math.pi / 2
        ok, cc = disk_fits(STADIUM,
                           tangent_disk(STADIUM, t_cap, Side.INTERNAL),
                           Side.INTERNAL)
        assert ok and cc.kind is ContactKind.BOUNDARY_ARC

    def test_wide_stadium_side_single_touch(self):
        t_side = 1.0
        ok, cc = disk_fits(WIDE_STADIUM,
                           tangent_disk(WIDE_STADIUM, t_side, Side.INTERNAL),
                           Side.INTERNAL)
        assert ok and cc.kind is ContactKind.SINGLETON
        assert cc.points[0].distance(Point(0.0, 1.25)) < 1e-9

    def test_dumbbell_neck_transversal_failure(self):
        J = DUMBBELL.junction_params()
        t_mid = J[2] + (J[3] - J[2]) / 2  # top wall midpoint
        ok, cc = disk_fits(DUMBBELL,
                           tangent_disk(DUMBBELL, t_mid, Side.INTERNAL),
                           Side.INTERNAL)
        assert not ok and cc.kind is ContactKind.TRANSVERSAL
        assert len(cc.points) >= 2
        # the disk pokes through the opposite wall
        ys = sorted(p.y for p in cc.points)
        assert ys[0] == pytest.approx(-0.8, abs=0.05)

    def test_transversal_requires_points(self):
        with pytest.raises(ValueError):
            ContactClass(kind=ContactKind.TRANSVERSAL, points=())


class TestEnclosure:
    def test_dumbbell_both_arcs_internal(self):
        fam = find_essential_pairs(DUMBBELL, sweep_n=SWEEP)
        assert len(fam) == 1
        pair = fam[0]
        assert enclosure_side(DUMBBELL, pair, arc="12") is \
            EnclosureSide.INTERNAL_ENCLOSURE
        assert enclosure_side(DUMBBELL, pair, arc="21") is \
            EnclosureSide.INTERNAL_ENCLOSURE

    def test_bitten_blob_pocket_is_external(self):
        fam = find_essential_pairs(BITTEN, sweep_n=SWEEP)
        assert len(fam) == 1
        pair = fam[0]
        # the short arc walks the pocket: its enclosure is outside material
        assert enclosure_side(BITTEN, pair, arc="12") is \
            EnclosureSide.EXTERNAL_ENCLOSURE
        # the long way around plus the mouth chord wraps the pocket too,
        # trapping cells of both sides
        assert enclosure_side(BITTEN, pair, arc="21") is \
            EnclosureSide.MIXED

    def test_arc_enclosure_samples_interior(self):
        fam = find_essential_pairs(DUMBBELL, sweep_n=SWEEP)[0]
        side = arc_enclosure(DUMBBELL, fam.t1, fam.t2)
        assert side is EnclosureSide.INTERNAL_ENCLOSURE


class TestClassifyDomain:
    @pytest.mark.parametrize("name,loop,internal,external", CATEGORY_MATRIX,
                             ids=[row[0] for row in CATEGORY_MATRIX])
    def test_category_matrix_both_methods(self, name, loop, internal,
                                          external):
        rep = classify_domain(loop, method=Method.BOTH, sweep_n=SWEEP)
        assert rep.internal is internal
        assert rep.external is external
        assert rep.rolling is (internal and external)
        if internal and external:
            assert rep.failures == ()
        else:
            assert len(rep.failures) > 0
            bad_sides = {f.side for f in rep.failures}
            if not internal:
                assert Side.INTERNAL in bad_sides
            if not external:
                assert Side.EXTERNAL in bad_sides

    def test_methods_agree_individually(self):
        d = classify_domain(DUMBBELL, method=Method.DIRECT, sweep_n=SWEEP)
        t = classify_domain(DUMBBELL, method=Method.TERMINAL, sweep_n=SWEEP)
        assert (d.internal, d.external) == (t.internal, t.external)

    def test_convex_always_rolls(self):
        for loop in (UNIT_CIRCLE, CIRCLE, STADIUM,
                     rectangle(KAPPA, width_factor=6.0, height_factor=4.0,
                               fillet_factor=1.5)):
            assert loop.is_convex()
            rep = classify_domain(loop, method=Method.BOTH, sweep_n=SWEEP)
            assert rep.rolling

    def test_rigid_motion_invariance(self):
        moved = rigid_motion(DUMBBELL)
        rep = classify_domain(moved, method=Method.BOTH, sweep_n=SWEEP)
        assert rep.internal is False and rep.external is True

    def test_worker_pool_matches_serial(self, monkeypatch):
        base = classify_domain(DUMBBELL, method=Method.DIRECT, sweep_n=SWEEP)
        monkeypatch.setenv("KAPPA_ROLL_THREADS", "4")
        pooled = classify_domain(DUMBBELL, method=Method.DIRECT,
                                 sweep_n=SWEEP)
        assert (pooled.internal, pooled.external) == (base.internal,
                                                      base.external)
        assert [f.t for f in pooled.failures] == [f.t for f in base.failures]


class TestRaster:
    def test_circle_area(self):
        m = rasterize(CIRCLE, 0.05)
        area = m.inside.sum() * m.cell ** 2
        assert area == pytest.approx(math.pi * 4.0, rel=0.01)

    def test_stadium_area(self):
        m = rasterize(STADIUM, 0.05)
        area = m.inside.sum() * m.cell ** 2
        assert area == pytest.approx(4.0 + math.pi, rel=0.01)

    def test_resolution_guard(self):
        with pytest.raises(ResolutionTooCoarse):
            rasterize(CIRCLE, R / 10)
        with pytest.raises(ResolutionTooCoarse):
            rasterize(CIRCLE, 0.0)

    def test_clearance_peaks_at_center(self):
        fld = distance_transform(rasterize(CIRCLE, 0.05))
        assert fld.at(Point(0.0, 0.0)) == pytest.approx(2.0, abs=0.1)

    @pytest.mark.parametrize("name,loop,internal,external", CATEGORY_MATRIX,
                             ids=[row[0] for row in CATEGORY_MATRIX])
    def test_oracle_matches_direct(self, name, loop, internal, external):
        oki, _ = oracle_rolling(loop, "internal", 0.025)
        oke, _ = oracle_rolling(loop, "external", 0.025)
        assert oki is internal
        assert oke is external

    def test_dumbbell_opens_into_two_equal_lobes(self):
        comps = opening_components(DUMBBELL, "internal", 0.02)
        assert len(comps) == 2
        a1, a2 = component_areas(comps, 0.02)
        assert a1 == pytest.approx(a2, rel=0.02)

    def test_clover_opens_into_three_lobes(self):
        comps = opening_components(CLOVER, "internal", 0.02)
        assert len(comps) == 3
        areas = component_areas(comps, 0.02)
        assert max(areas) == pytest.approx(min(areas), rel=0.02)

    def test_circle_opening_recovers_disk(self):
        comps = opening_components(CIRCLE, "internal", 0.04)
        assert len(comps) == 1
        area = component_areas(comps, 0.04)[0]
        assert area == pytest.approx(math.pi * 4.0, rel=0.03)

    def test_bitten_blob_external_pocket_component(self):
        # corridor clearance sits within two cells of r at 0.04, so the
        # erosion slack merges the pocket there; 0.02 resolves it
        comps = opening_components(BITTEN, "external", 0.02)
        assert len(comps) == 2
        pocket = component_areas(comps, 0.02)[-1]
        assert 3.0 < pocket < 8.0

    def test_pgm_dump(self, tmp_path):
        m = rasterize(UNIT_CIRCLE, 0.05)
        out = tmp_path / "mask.pgm"
        write_pgm(str(out), m.inside)
        blob = out.read_bytes()
        assert blob.startswith(b"P5 ")
