"""JSON, CSV and SVG export."""

import csv
import io
import json
import math

import numpy as np

from .montecarlo import SCHEMA

SVG_SIZE = 512
TRACE_COLUMNS = ("theta", "Ax", "Ay", "Bx", "By", "Cx", "Cy", "degenerate")


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if hasattr(o, "to_dict"):
        return o.to_dict()
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj, **kw):
    if isinstance(obj, dict) and "schema" not in obj:
        obj = {"schema": SCHEMA, **obj}
    return json.dumps(obj, default=_default, **kw)


def frames_payload(frames, provenance):
    """Sample dump: frames plus the (seed, stream, counter) triple."""
    F = np.asarray(frames)
    return {"schema": SCHEMA, **provenance,
            "frames": [{"n": F.shape[1], "u": f[:, 0].tolist(), "v": f[:, 1].tolist()}
                       for f in F]}


def trace_rows(trace):
    rows = []
    for step in trace:
        if step.degenerate:
            rows.append((step.theta,) + (float("nan"),) * 6 + (1,))
        else:
            rows.append((step.theta,) + tuple(step.vertices.ravel().tolist()) + (0,))
    return rows


def trace_csv(trace):
    """Orbit trace as CSV; degenerate steps have empty vertex fields."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for row in trace_rows(trace):
        w.writerow(["" if isinstance(x, float) and math.isnan(x) else x for x in row])
    return buf.getvalue()


def trace_payload(trace, point, axis):
    steps = []
    for step in trace:
        steps.append({"theta": step.theta, "point": list(step.point),
                      "degenerate": step.degenerate,
                      "vertices": None if step.degenerate else step.vertices.tolist()})
    return {"schema": SCHEMA, "point": list(map(float, point)),
            "axis": list(map(float, axis)), "steps": steps}


def table_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def polygons_svg(polygons, labels=None, columns=None):
    """Self-contained SVG with a fixed 512x512 viewport.

    Polygons are laid out on a grid, each autoscaled into its own cell.
    """
    polys = [np.asarray(p.edges if hasattr(p, "edges") else p, dtype=float) for p in polygons]
    k = len(polys)
    columns = columns or math.ceil(math.sqrt(k))
    rows = math.ceil(k / columns)
    cell = SVG_SIZE / max(columns, rows)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" '
             f'height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
             f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>']
    for idx, E in enumerate(polys):
        V = np.vstack([np.zeros(2), np.cumsum(E, axis=0)])
        lo, hi = V.min(axis=0), V.max(axis=0)
        span = max(float((hi - lo).max()), 1e-12)
        scale = 0.8 * cell / span
        ox = (idx % columns) * cell + cell / 2
        oy = (idx // columns) * cell + cell / 2
        mid = (lo + hi) / 2
        pts = " ".join(f"{ox + scale * (x - mid[0]):.3f},{oy - scale * (y - mid[1]):.3f}"
                       for x, y in V)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>')
        sx, sy = ox + scale * (V[0, 0] - mid[0]), oy - scale * (V[0, 1] - mid[1])
        parts.append(f'<circle cx="{sx:.3f}" cy="{sy:.3f}" r="2.5" fill="black"/>')
        if labels:
            parts.append(f'<text x="{ox - cell / 2 + 4:.1f}" y="{oy - cell / 2 + 12:.1f}" '
                         f'font-size="10" font-family="sans-serif">{labels[idx]}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
