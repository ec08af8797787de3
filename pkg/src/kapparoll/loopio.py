"""Loop serialization and report documents.

Loops travel as JSON objects: a curvature bound plus a list of arc and
segment pieces.  Reports are plain dicts emitted through a canonical
writer (fixed key order, floats at 17 significant digits) so repeated
runs produce byte-identical documents.
"""
from __future__ import annotations

import json
import math
from typing import Optional

import numpy as np

from . import __version__
from .classify import ArcClass, End, TerminalPair
from .decompose import Decomposition, Region, ReplacementArc
from .errors import ValidationError
from .geometry import Arc, Point, Segment
from .loop import Loop
from .rolling import Failure, RollingReport

SCHEMA = 1


# ---------------------------------------------------------------------------
# canonical JSON


def fmt(x: float) -> str:
    """Shortest-of-17-significant-digits decimal, round-trip safe."""
    if x != x:
        raise ValueError("NaN has no canonical form")
    s = format(float(x), ".17g")
    # prefer the shorter repr when it round-trips to the same double
    r = repr(float(x))
    return r if float(r) == float(s) and len(r) < len(s) else s


def _emit(obj, out: list, indent: int) -> None:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}  {json.dumps(str(k))}: ")
            _emit(v, out, indent + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad + "  ")
            _emit(v, out, indent + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt(float(obj)))
    elif obj is None:
        out.append("null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    out: list = []
    _emit(obj, out, 0)
    out.append("\n")
    return "".join(out)


# ---------------------------------------------------------------------------
# loop specs


def loop_to_spec(loop: Loop) -> dict:
    pieces = []
    for p in loop.pieces:
        if isinstance(p, Segment):
            pieces.append({
                "type": "segment",
                "from": [p.start.x, p.start.y],
                "to": [p.end.x, p.end.y],
            })
        else:
            pieces.append({
                "type": "arc",
                "center": [p.center.x, p.center.y],
                "radius": p.radius,
                "start_angle": p.start_angle,
                "sweep": p.sweep,
            })
    doc = {"kappa": loop.kappa, "pieces": pieces}
    if loop.metadata:
        doc["metadata"] = dict(sorted(loop.metadata.items()))
    return doc


def dumps_loop(loop: Loop) -> str:
    return canonical_json(loop_to_spec(loop))


def _number(spec: dict, key: str, where: str) -> float:
    v = spec.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise SyntaxError(f"{where}.{key}: expected a number, got {v!r}")
    return float(v)


def _pt(spec: dict, key: str, where: str) -> Point:
    v = spec.get(key)
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool)
                       for c in v)):
        raise SyntaxError(f"{where}.{key}: expected [x, y], got {v!r}")
    return Point(float(v[0]), float(v[1]))


def _piece_from_spec(spec, index: int):
    where = f"pieces[{index}]"
    if not isinstance(spec, dict):
        raise SyntaxError(f"{where}: expected an object, got {spec!r}")
    kind = spec.get("type")
    if kind == "segment":
        return Segment(_pt(spec, "from", where), _pt(spec, "to", where))
    if kind == "arc":
        return Arc(_pt(spec, "center", where),
                   _number(spec, "radius", where),
                   _number(spec, "start_angle", where),
                   _number(spec, "sweep", where))
    raise SyntaxError(f"{where}.type: expected \"arc\" or \"segment\", "
                      f"got {kind!r}")


def loop_from_spec(doc: dict, kappa: Optional[float] = None) -> Loop:
    """Build and validate a Loop from a parsed spec object.

    kappa overrides the document's curvature bound when given.
    """
    if not isinstance(doc, dict):
        raise SyntaxError(f"top level: expected an object, got {type(doc).__name__}")
    if kappa is None:
        kappa = _number(doc, "kappa", "top level")
    raw = doc.get("pieces")
    if not isinstance(raw, list) or not raw:
        raise SyntaxError("top level.pieces: expected a non-empty list")
    pieces = [_piece_from_spec(p, i) for i, p in enumerate(raw)]
    meta = doc.get("metadata")
    if meta is not None and not isinstance(meta, dict):
        raise SyntaxError("top level.metadata: expected an object")
    return Loop(pieces, kappa, metadata=meta)


def parse_loop(text: str, kappa: Optional[float] = None) -> Loop:
    """Parse JSON text into a validated Loop.

    Malformed documents raise SyntaxError with the offending locus;
    geometric rejections propagate as ValidationError subclasses whose
    messages carry the piece index.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SyntaxError(f"line {exc.lineno}, column {exc.colno}: "
                          f"{exc.msg}") from exc
    return loop_from_spec(doc, kappa=kappa)


# ---------------------------------------------------------------------------
# report documents


def _point_doc(p: Point) -> list:
    return [p.x, p.y]


def _arc_class_doc(c: ArcClass) -> dict:
    doc = {"short": c.is_short, "long": c.is_long, "simple": c.is_simple,
           "chord": c.chord}
    if c.witness_outside is not None:
        t, p = c.witness_outside
        doc["witness"] = {"t": t, "point": _point_doc(p)}
    return doc


def _pair_doc(pair: TerminalPair) -> dict:
    return {"t1": pair.t1, "t2": pair.t2, "essential": pair.essential,
            "side_12": _arc_class_doc(pair.class_12),
            "side_21": _arc_class_doc(pair.class_21)}


def _end_doc(end: End) -> dict:
    return {"t1": end.t1, "t2": end.t2, "length": end.length,
            "essential": end.essential,
            "circle": {"center": _point_doc(end.circle.center),
                       "radius": end.circle.radius}}


def _failure_doc(f: Failure) -> dict:
    doc = {"t": f.t, "side": f.side.value}
    ob = f.obstruction
    if isinstance(ob, TerminalPair):
        doc["pair"] = {"t1": ob.t1, "t2": ob.t2}
    elif ob is not None:
        kind = getattr(ob, "kind", None)
        doc["contact"] = kind.value if kind is not None else str(ob)
    return doc


def _replacement_doc(lam: ReplacementArc) -> dict:
    g = lam.geometry
    return {"t1": lam.pair.t1, "t2": lam.pair.t2,
            "center": _point_doc(g.center), "radius": g.radius,
            "start_angle": g.start_angle, "sweep": g.sweep}


def _region_doc(reg: Region) -> dict:
    return {
        "kind": reg.kind.value,
        "bounded": reg.bounded,
        "area": reg.area if reg.bounded else None,
        "piece_count": len(reg.pieces),
        "intervals": [[a, b] for a, b in reg.intervals],
        "replacements": [_replacement_doc(l) for l in reg.replacements],
    }


def report_header(loop: Loop, command: str) -> dict:
    meta = loop.metadata or {}
    return {
        "tool": "kapparoll",
        "version": __version__,
        "schema": SCHEMA,
        "command": command,
        "loop": meta.get("name"),
        "kappa": loop.kappa,
        "length": loop.length,
        "pieces": len(loop.pieces),
        "tolerances": {"eps_geom": loop.tol.eps_geom,
                       "eps_param": loop.tol.eps_param},
    }


def validate_doc(loop: Loop) -> dict:
    doc = report_header(loop, "validate")
    doc["valid"] = True
    doc["convex"] = loop.is_convex()
    doc["signed_area"] = loop.signed_area()
    return doc


def classify_doc(loop: Loop, report: RollingReport) -> dict:
    doc = report_header(loop, "classify")
    doc["method"] = report.method.value
    doc["internal"] = report.internal
    doc["external"] = report.external
    doc["rolling"] = report.rolling
    doc["failures"] = [_failure_doc(f) for f in report.failures]
    return doc


def terminals_doc(loop: Loop, pairs: list) -> dict:
    doc = report_header(loop, "terminals")
    doc["families"] = [_pair_doc(p) for p in pairs]
    return doc


def ends_doc(loop: Loop, ends: list) -> dict:
    doc = report_header(loop, "ends")
    doc["ends"] = [_end_doc(e) for e in ends]
    return doc


def decompose_doc(loop: Loop, dec: Decomposition) -> dict:
    doc = report_header(loop, "decompose")
    doc["side"] = dec.side.value
    doc["resolution"] = dec.stats["resolution"]
    doc["counts"] = {"rolling": dec.stats["rolling"],
                     "neck": dec.stats["neck"],
                     "excluded": dec.stats["excluded"]}
    doc["regions"] = [_region_doc(r) for r in dec.regions]
    return doc


def oracle_doc(loop: Loop, resolution: float, internal: tuple,
               external: tuple, areas: list) -> dict:
    doc = report_header(loop, "oracle")
    doc["resolution"] = resolution
    doc["internal"] = {"ok": internal[0], "failures": list(internal[1])}
    doc["external"] = {"ok": external[0], "failures": list(external[1])}
    doc["opening_component_areas"] = list(areas)
    return doc


def dumps_report(doc: dict) -> str:
    return canonical_json(doc)
