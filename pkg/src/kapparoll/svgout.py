"""Deterministic SVG rendering of loops and analysis overlays.

The drawing is two path elements for the domain (fill, then outline on
top of the overlays) plus one element per overlay, emitted in input
order with fixed styling, so renders of the same input are
byte-identical.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .classify import End, HalfDisk, TerminalPair
from .decompose import Region, RegionKind, ReplacementArc
from .geometry import Arc, Disk, Lens, Point, Segment
from .loop import Loop
from .loopio import fmt

REGION_FILL = {
    RegionKind.ROLLING: "#b5d9a8",
    RegionKind.NECK: "#e8a8a8",
    RegionKind.EXCLUDED: "#e3cf8e",
}
DOMAIN_FILL = "#dce8f5"
STROKE = "#22344f"
ACCENT = "#b03030"
DISK_STROKE = "#2f6db0"


def _xy(p: Point) -> str:
    return f"{fmt(p.x)} {fmt(-p.y)}"


def _arc_cmd(arc: Arc, s0: float, s1: float) -> str:
    """A-command from arc-length s0 to s1 along the arc (s1 - s0 <= pi*R)."""
    end = arc.point_at(s1)
    # the y flip mirrors orientation, so positive sweep renders flag 0
    flag = 0 if arc.sweep > 0 else 1
    r = fmt(arc.radius)
    return f"A {r} {r} 0 0 {flag} {_xy(end)}"


def _piece_cmds(piece, out: list) -> None:
    if isinstance(piece, Segment):
        out.append(f"L {_xy(piece.end)}")
        return
    half = piece.length / 2.0
    span = abs(piece.sweep)
    if span > math.pi:
        out.append(_arc_cmd(piece, 0.0, half))
        out.append(_arc_cmd(piece, half, piece.length))
    else:
        out.append(_arc_cmd(piece, 0.0, piece.length))


def path_d(pieces: Sequence, close: bool = True) -> str:
    """SVG path data following the piece chain."""
    first = pieces[0]
    start = first.start if isinstance(first, Segment) else first.start_point
    out = [f"M {_xy(start)}"]
    for p in pieces:
        _piece_cmds(p, out)
    if close:
        out.append("Z")
    return " ".join(out)


def _el(tag: str, body: str = "", **attrs) -> str:
    parts = [f"<{tag}"]
    for k, v in attrs.items():
        parts.append(f' {k.replace("_", "-")}="{v}"')
    if body:
        return "".join(parts) + f">{body}</{tag}>"
    return "".join(parts) + "/>"


def _circle_el(d: Disk, sw: float, stroke: str = DISK_STROKE,
               fill: str = "none", dash: str = "") -> str:
    attrs = dict(cx=fmt(d.center.x), cy=fmt(-d.center.y), r=fmt(d.radius),
                 fill=fill, stroke=stroke, stroke_width=fmt(sw))
    if dash:
        attrs["stroke_dasharray"] = dash
    return _el("circle", **attrs)


def _chord_el(p: Point, q: Point, sw: float, stroke: str = ACCENT) -> str:
    return _el("line", x1=fmt(p.x), y1=fmt(-p.y), x2=fmt(q.x), y2=fmt(-q.y),
               stroke=stroke, stroke_width=fmt(sw))


def _half_disk_el(hd: HalfDisk, sw: float) -> str:
    a = hd.center + hd.along * hd.radius
    b = hd.center - hd.along * hd.radius
    # semicircle from a to b bulging toward `toward`
    mid = hd.center + hd.toward * hd.radius
    ccw = (a - hd.center).cross(mid - hd.center) > 0
    flag = 0 if ccw else 1
    r = fmt(hd.radius)
    d = f"M {_xy(a)} A {r} {r} 0 0 {flag} {_xy(b)} Z"
    return _el("path", d=d, fill="#d9b8b8", fill_opacity="0.6",
               stroke=ACCENT, stroke_width=fmt(sw))


def _lens_el(lens: Lens, sw: float) -> str:
    p, q = lens.p, lens.q
    r = fmt(lens.radius)
    if lens.d1.center.distance(lens.d2.center) < 1e-12 * lens.radius:
        return _circle_el(lens.d1, sw, stroke=ACCENT, fill="#e7d3d3")
    # two minor arcs bounding the intersection
    d = (f"M {_xy(p)} A {r} {r} 0 0 0 {_xy(q)} "
         f"A {r} {r} 0 0 0 {_xy(p)} Z")
    return _el("path", d=d, fill="#e7d3d3", fill_opacity="0.7",
               stroke=ACCENT, stroke_width=fmt(sw))


def _trace_el(points: Iterable, sw: float) -> str:
    coords = []
    for p in points:
        x, y = (p.x, p.y) if isinstance(p, Point) else (p[0], p[1])
        coords.append(f"{fmt(x)},{fmt(-y)}")
    return _el("polyline", points=" ".join(coords), fill="none",
               stroke="#3a7d3a", stroke_width=fmt(sw),
               stroke_dasharray=f"{fmt(3 * sw)} {fmt(3 * sw)}")


def _region_el(reg: Region, sw: float) -> str:
    d = path_d(reg.pieces)
    if not reg.bounded:
        return _el("path", d=d, fill="none", stroke=REGION_FILL[reg.kind],
                   stroke_width=fmt(2 * sw),
                   stroke_dasharray=f"{fmt(4 * sw)} {fmt(2 * sw)}")
    return _el("path", d=d, fill=REGION_FILL[reg.kind], fill_opacity="0.85",
               stroke="none")


def _overlay_el(loop: Loop, item, sw: float) -> str:
    if isinstance(item, Disk):
        return _circle_el(item, sw)
    if isinstance(item, Region):
        return _region_el(item, sw)
    if isinstance(item, HalfDisk):
        return _half_disk_el(item, sw)
    if isinstance(item, Lens):
        return _lens_el(item, sw)
    if isinstance(item, End):
        p = loop.point_at(item.t1)
        q = loop.point_at(item.t2)
        return (_circle_el(item.circle, sw, dash=f"{fmt(2 * sw)} {fmt(2 * sw)}")
                + _chord_el(p, q, sw))
    if isinstance(item, TerminalPair):
        return _chord_el(loop.point_at(item.t1), loop.point_at(item.t2), sw)
    if isinstance(item, ReplacementArc):
        return _el("path", d=path_d([item.geometry], close=False),
                   fill="none", stroke=ACCENT, stroke_width=fmt(1.5 * sw))
    if isinstance(item, (tuple, list, np.ndarray)):
        return _trace_el(item, sw)
    raise TypeError(f"no overlay rendering for {type(item).__name__}")


def render_svg(loop: Loop, overlays: Sequence = (), size: int = 640) -> str:
    """Standalone SVG document: domain fill, overlays, boundary outline."""
    x0, y0, x1, y1 = loop.bbox()
    margin = 0.75 * loop.radius
    x0 -= margin
    y0 -= margin
    x1 += margin
    y1 += margin
    w = x1 - x0
    h = y1 - y0
    sw = max(w, h) / 480.0
    view = f"{fmt(x0)} {fmt(-y1)} {fmt(w)} {fmt(h)}"
    height = int(round(size * h / w))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{view}" '
        f'width="{size}" height="{height}">',
        _el("path", d=path_d(loop.pieces), fill=DOMAIN_FILL, stroke="none"),
    ]
    for item in overlays:
        parts.append(_overlay_el(loop, item, sw))
    parts.append(_el("path", d=path_d(loop.pieces), fill="none",
                     stroke=STROKE, stroke_width=fmt(1.2 * sw)))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
