"""Serialization, report, SVG, and command-line behavior.

Each CLI test drives main() in-process and parses the JSON report from
stdout; exit codes follow the documented 0/1/2/3 scheme.
"""

import json
import math
import xml.etree.ElementTree as ET

import pytest

from kapparoll.classify import find_end, find_essential_pairs, find_long_arc, half_disk
from kapparoll.cli import main
from kapparoll.decompose import decompose
from kapparoll.errors import CurvatureExceeded, MethodDisagreement, NotClosed
from kapparoll.geometry import Arc, Disk, Lens, Point, disks_through
from kapparoll.loopio import (
    canonical_json,
    dumps_loop,
    loop_to_spec,
    parse_loop,
)
from kapparoll.rolling import Side, tangent_disk
from kapparoll.shapes import circle, dumbbell, stadium, wavy_blob
from kapparoll.svgout import render_svg

K = 1.0


@pytest.fixture(scope="module")
def loops(tmp_path_factory):
    d = tmp_path_factory.mktemp("loops")
    files = {}
    for name, loop in [("circle", circle(K, radius_factor=2.0)),
                       ("stadium", stadium(K)),
                       ("dumbbell", dumbbell(K)),
                       ("wavy", wavy_blob(K))]:
        p = d / f"{name}.loop"
        p.write_text(dumps_loop(loop))
        files[name] = str(p)
    return files


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestLoopIO:
    def test_round_trip_is_exact(self):
        loop = wavy_blob(K)
        again = parse_loop(dumps_loop(loop))
        assert len(again.pieces) == len(loop.pieces)
        for a, b in zip(loop.pieces, again.pieces):
            assert type(a) is type(b)
            if isinstance(a, Arc):
                assert b.center.x == a.center.x
                assert b.center.y == a.center.y
                assert b.radius == a.radius
                assert b.start_angle == a.start_angle
                assert b.sweep == a.sweep
            else:
                assert b.start.x == a.start.x
                assert b.end.y == a.end.y

    def test_stadium_spec_shape(self):
        spec = loop_to_spec(stadium(K))
        kinds = [p["type"] for p in spec["pieces"]]
        assert sorted(kinds) == ["arc", "arc", "segment", "segment"]
        text = dumps_loop(stadium(K))
        assert dumps_loop(parse_loop(text)) == text

    def test_curvature_error_carries_piece_index(self):
        bad = json.dumps({"kappa": 1.0, "pieces": [
            {"type": "arc", "center": [0, 0], "radius": 0.5,
             "start_angle": 0.0, "sweep": -2 * math.pi}]})
        with pytest.raises(CurvatureExceeded, match="piece 0"):
            parse_loop(bad)

    def test_unclosed_chain(self):
        bad = json.dumps({"kappa": 1.0, "pieces": [
            {"type": "segment", "from": [0, 0], "to": [1, 0]}]})
        with pytest.raises(NotClosed):
            parse_loop(bad)

    def test_malformed_json_locus(self):
        with pytest.raises(SyntaxError, match="line 1"):
            parse_loop('{"kappa": 1.0,')

    def test_field_locus(self):
        bad = '{"kappa": 1.0, "pieces": [{"type": "arc", "center": [0]}]}'
        with pytest.raises(SyntaxError, match=r"pieces\[0\].center"):
            parse_loop(bad)

    def test_canonical_json_rejects_nan(self):
        with pytest.raises(ValueError):
            canonical_json({"x": float("nan")})


class TestSVG:
    def test_circle_with_disk_element_counts(self):
        loop = circle(K, radius_factor=2.0)
        svg = render_svg(loop, [tangent_disk(loop, 0.0, Side.INTERNAL)])
        assert svg.count("<path") == 2
        assert svg.count("<circle") == 1
        ET.fromstring(svg)

    def test_dumbbell_regions_at_least_three_paths(self):
        loop = dumbbell(K)
        dec = decompose(loop, Side.INTERNAL)
        svg = render_svg(loop, list(dec.regions))
        assert svg.count("<path") >= 3 + 2
        ET.fromstring(svg)

    def test_byte_identical_across_runs(self):
        loop = dumbbell(K)
        mk = lambda: render_svg(loop, list(decompose(loop,
                                                     Side.INTERNAL).regions))
        assert mk() == mk()

    def test_overlay_vocabulary(self):
        loop = dumbbell(K)
        pair = find_essential_pairs(loop)[0]
        t1, t2 = find_long_arc(loop)
        end = find_end(loop, t1, t2)
        hd = half_disk(loop, end, verify=False)
        c1, c2 = disks_through(loop.point_at(0.0), loop.point_at(1.0), 1.0,
                               loop.tol.eps_geom)
        lens = Lens(Disk(c1, 1.0), Disk(c2, 1.0),
                    loop.point_at(0.0), loop.point_at(1.0))
        trace = [Point(0.0, 0.0), Point(0.5, 0.1)]
        svg = render_svg(loop, [pair, end, hd, lens, trace])
        assert svg.count("<line") == 2  # pair chord + end chord
        assert svg.count("<polyline") == 1
        ET.fromstring(svg)

    def test_unknown_overlay_rejected(self):
        with pytest.raises(TypeError):
            render_svg(circle(K), [object()])


class TestCLI:
    def test_validate_ok(self, capsys, loops):
        code, doc = run_json(capsys, ["validate", loops["stadium"]])
        assert code == 0
        assert doc["valid"] is True
        assert doc["convex"] is True
        assert doc["command"] == "validate"

    def test_missing_file(self, capsys, loops):
        assert main(["validate", loops["stadium"] + ".nope"]) == 2

    def test_invalid_loop_exit_2(self, capsys, tmp_path):
        p = tmp_path / "open.loop"
        p.write_text(json.dumps({"kappa": 1.0, "pieces": [
            {"type": "segment", "from": [0, 0], "to": [1, 0]}]}))
        assert main(["validate", str(p)]) == 2
        assert "NotClosed" in capsys.readouterr().err

    def test_unknown_command_exit_2(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_classify_rolling_exit_0(self, capsys, loops):
        code, doc = run_json(capsys, ["classify", loops["stadium"],
                                      "--method", "both"])
        assert code == 0
        assert doc["rolling"] is True
        assert doc["failures"] == []

    def test_classify_not_rolling_exit_1(self, capsys, loops):
        code, doc = run_json(capsys, ["classify", loops["dumbbell"]])
        assert code == 1
        assert doc["internal"] is False
        assert doc["external"] is True
        failures = [f for f in doc["failures"] if f["side"] == "internal"]
        assert failures

    def test_method_disagreement_exit_3(self, capsys, loops, monkeypatch):
        import kapparoll.cli as cli_mod

        def boom(*a, **kw):
            raise MethodDisagreement("direct says yes, terminal says no")

        monkeypatch.setattr(cli_mod, "classify_domain", boom)
        assert main(["classify", loops["stadium"]]) == 3
        assert "MethodDisagreement" in capsys.readouterr().err

    def test_terminals_dumbbell(self, capsys, loops):
        code, doc = run_json(capsys, ["terminals", loops["dumbbell"]])
        assert code == 0
        assert len(doc["families"]) == 1
        fam = doc["families"][0]
        assert fam["essential"] is True
        assert fam["side_12"]["long"] and fam["side_21"]["long"]

    def test_ends_dumbbell(self, capsys, loops):
        code, doc = run_json(capsys, ["ends", loops["dumbbell"]])
        assert code == 0
        end = doc["ends"][0]
        assert end["circle"]["radius"] == pytest.approx(1.0, abs=1e-9)
        assert end["length"] >= math.pi - 1e-6

    def test_decompose_dumbbell(self, capsys, loops):
        code, doc = run_json(capsys, ["decompose", loops["dumbbell"],
                                      "--side", "internal"])
        assert code == 0
        assert doc["counts"] == {"rolling": 2, "neck": 1, "excluded": 0}
        kinds = sorted(r["kind"] for r in doc["regions"])
        assert kinds == ["neck", "rolling", "rolling"]
        for reg in doc["regions"]:
            assert reg["bounded"] is True
            assert reg["area"] > 0

    def test_oracle_exit_codes(self, capsys, loops):
        assert main(["oracle", loops["stadium"], "--resolution", "0.05"]) == 0
        capsys.readouterr()
        code, doc = run_json(capsys, ["oracle", loops["dumbbell"],
                                      "--resolution", "0.05"])
        assert code == 1
        assert doc["internal"]["ok"] is False
        assert doc["external"]["ok"] is True
        assert len(doc["opening_component_areas"]) == 2

    def test_oracle_pgm_dump(self, capsys, loops, tmp_path):
        out = tmp_path / "mask.pgm"
        main(["oracle", loops["stadium"], "--resolution", "0.05",
              "--dump-pgm", str(out)])
        assert out.read_bytes().startswith(b"P5 ")

    def test_render_to_file(self, capsys, loops, tmp_path):
        out = tmp_path / "out.svg"
        code = main(["render", loops["dumbbell"], "--overlay", "regions",
                     "--overlay", "trace", "-o", str(out)])
        assert code == 0
        svg = out.read_text()
        assert svg.count("<path") >= 5
        assert "<polyline" in svg

    def test_render_deterministic(self, capsys, loops, tmp_path):
        a = tmp_path / "a.svg"
        b = tmp_path / "b.svg"
        for path in (a, b):
            main(["render", loops["dumbbell"], "--overlay", "regions",
                  "--overlay", "terminals", "-o", str(path)])
        assert a.read_bytes() == b.read_bytes()

    def test_report_byte_stable(self, capsys, loops):
        main(["decompose", loops["dumbbell"]])
        first = capsys.readouterr().out
        main(["decompose", loops["dumbbell"]])
        second = capsys.readouterr().out
        assert first == second

    def test_kappa_override(self, capsys, loops):
        code, doc = run_json(capsys, ["validate", loops["stadium"],
                                      "--kappa", "2.0"])
        assert code == 0
        assert doc["kappa"] == 2.0

    def test_eps_flags_reported(self, capsys, loops):
        code, doc = run_json(capsys, ["validate", loops["stadium"],
                                      "--eps-geom", "1e-06"])
        assert code == 0
        assert doc["tolerances"]["eps_geom"] == 1e-06

    def test_sweep_n_flag(self, capsys, loops):
        code, doc = run_json(capsys, ["terminals", loops["dumbbell"],
                                      "--sweep-n", "128"])
        assert code == 0
        assert len(doc["families"]) == 1
