"""Command-line surface.

Subcommands map one-to-one onto the library's analyses and print JSON
reports on stdout.  Exit codes separate outcomes for scripting: 0 the
command succeeded (and any analyzed property holds), 1 the analysis ran
but found the property false, 2 the input was unusable, 3 an internal
check failed (method disagreement, non-termination).
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .classify import find_end, find_essential_pairs, find_long_arc, half_disk
from .config import default_tolerances, Tolerances
from .decompose import decompose, seed_disk
from .errors import AnalysisError, ValidationError
from .loop import Loop
from .loopio import (
    classify_doc,
    decompose_doc,
    dumps_report,
    ends_doc,
    oracle_doc,
    parse_loop,
    terminals_doc,
    validate_doc,
)
from .raster import component_areas, opening_components, oracle_rolling, write_pgm
from .rolling import Method, Side, classify_domain, tangent_disk
from .svgout import render_svg

OVERLAYS = ("seed", "disks", "terminals", "ends", "regions", "trace")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kappa", type=float, default=None,
                        help="override the curvature bound from the file")
    common.add_argument("--eps-geom", type=float, default=None,
                        help="absolute geometric tolerance")
    common.add_argument("--eps-param", type=float, default=None,
                        help="absolute parameter tolerance")
    common.add_argument("--sweep-n", type=int, default=None,
                        help="terminal sweep grid size")
    common.add_argument("--resolution", type=float, default=None,
                        help="raster cell size for oracle and seeding")

    ap = argparse.ArgumentParser(
        prog="kapparoll", parents=[common],
        description="Rolling-disk analysis of curvature-bounded loops.")
    ap.add_argument("--version", action="version",
                    version=f"kapparoll {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common],
                       help="parse and validate a loop file")
    p.add_argument("file")

    p = sub.add_parser("classify", parents=[common],
                       help="internal/external/rolling verdicts")
    p.add_argument("file")
    p.add_argument("--method", choices=[m.value for m in Method],
                   default="both")

    p = sub.add_parser("terminals", parents=[common],
                       help="essential terminal families")
    p.add_argument("file")

    p = sub.add_parser("ends", parents=[common],
                       help="an End of a long sub-curve with its circle")
    p.add_argument("file")

    p = sub.add_parser("decompose", parents=[common],
                       help="maximal rolling regions and leftovers")
    p.add_argument("file")
    p.add_argument("--side", choices=[s.value for s in Side],
                   default="internal")

    p = sub.add_parser("oracle", parents=[common],
                       help="brute-force raster cross-check")
    p.add_argument("file")
    p.add_argument("--dump-pgm", default=None, metavar="PATH",
                   help="write the occupancy raster as a graymap")

    p = sub.add_parser("render", parents=[common], help="draw an SVG")
    p.add_argument("file")
    p.add_argument("--side", choices=[s.value for s in Side],
                   default="internal")
    p.add_argument("--overlay", action="append", default=[],
                   choices=OVERLAYS, help="repeatable overlay selector")
    p.add_argument("-o", "--output", default="-",
                   help="output path, - for stdout")
    return ap


def _load(args) -> Loop:
    with open(args.file, "r", encoding="utf-8") as fh:
        text = fh.read()
    loop = parse_loop(text, kappa=args.kappa)
    if args.eps_geom is not None or args.eps_param is not None:
        base = default_tolerances(loop.radius, loop.length)
        tol = Tolerances(
            eps_geom=args.eps_geom if args.eps_geom is not None else base.eps_geom,
            eps_param=args.eps_param if args.eps_param is not None else base.eps_param)
        loop = Loop(loop.pieces, loop.kappa, tol=tol, metadata=loop.metadata)
    return loop


def _sweep_kw(args) -> dict:
    return {} if args.sweep_n is None else {"sweep_n": args.sweep_n}


def _emit(doc: dict) -> None:
    sys.stdout.write(dumps_report(doc))


def _cmd_validate(args, loop: Loop) -> int:
    _emit(validate_doc(loop))
    return 0


def _cmd_classify(args, loop: Loop) -> int:
    report = classify_domain(loop, method=Method(args.method), **_sweep_kw(args))
    _emit(classify_doc(loop, report))
    return 0 if report.rolling else 1


def _cmd_terminals(args, loop: Loop) -> int:
    pairs = find_essential_pairs(loop, **_sweep_kw(args))
    _emit(terminals_doc(loop, pairs))
    return 0


def _cmd_ends(args, loop: Loop) -> int:
    t1, t2 = find_long_arc(loop)
    end = find_end(loop, t1, t2, **_sweep_kw(args))
    _emit(ends_doc(loop, [end]))
    return 0


def _cmd_decompose(args, loop: Loop) -> int:
    dec = decompose(loop, Side(args.side), resolution=args.resolution)
    _emit(decompose_doc(loop, dec))
    return 0


def _cmd_oracle(args, loop: Loop) -> int:
    res = args.resolution if args.resolution is not None else loop.radius / 100.0
    internal = oracle_rolling(loop, "internal", res)
    external = oracle_rolling(loop, "external", res)
    comps, mask, _fld = opening_components(loop, "internal", res,
                                           with_grid=True)
    if args.dump_pgm:
        write_pgm(args.dump_pgm, mask.inside)
    _emit(oracle_doc(loop, res, internal, external,
                     component_areas(comps, mask.cell)))
    return 0 if internal[0] and external[0] else 1


def _cmd_render(args, loop: Loop) -> int:
    side = Side(args.side)
    overlays: list = []
    for name in args.overlay:
        if name == "seed":
            overlays.append(seed_disk(loop, side,
                                      resolution=args.resolution))
        elif name == "disks":
            n = 8
            overlays.extend(tangent_disk(loop, k * loop.length / n, side)
                            for k in range(n))
        elif name == "terminals":
            overlays.extend(find_essential_pairs(loop, **_sweep_kw(args)))
        elif name == "ends":
            t1, t2 = find_long_arc(loop)
            end = find_end(loop, t1, t2, **_sweep_kw(args))
            overlays.append(end)
            overlays.append(half_disk(loop, end, verify=False))
        elif name == "regions":
            dec = decompose(loop, side, resolution=args.resolution)
            overlays.extend(dec.regions)
        elif name == "trace":
            dec = decompose(loop, side, resolution=args.resolution)
            overlays.extend(r.center_trace for r in dec.regions
                            if r.center_trace)
    svg = render_svg(loop, overlays)
    if args.output == "-":
        sys.stdout.write(svg)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(svg)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "classify": _cmd_classify,
    "terminals": _cmd_terminals,
    "ends": _cmd_ends,
    "decompose": _cmd_decompose,
    "oracle": _cmd_oracle,
    "render": _cmd_render,
}


def _fail(kind: str, message: str) -> None:
    sys.stderr.write(f"kapparoll: {kind}: {message}\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        loop = _load(args)
    except (OSError, SyntaxError, ValidationError, ValueError) as exc:
        _fail(type(exc).__name__, str(exc))
        return 2
    try:
        return _COMMANDS[args.command](args, loop)
    except ValidationError as exc:
        _fail(type(exc).__name__, str(exc))
        return 2
    except AnalysisError as exc:
        _fail(type(exc).__name__, str(exc))
        return 3


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
