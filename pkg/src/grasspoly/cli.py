"""``grasspoly`` command-line entry point.

Exit codes: 0 success, 2 validation error (JSON on stderr), 3 a statistical
or invariant check failed.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import io as gio
from . import verify as gverify
from .exceptions import GrassPolyError, InsufficientSamplesError
from .grassmann import sign_arrays, signature_row
from .hyperoctahedral import (
    base_cell_signature,
    chamber_count_formula,
    orbit_of_signature,
    positive_chamber_signature,
    stabilizer_of_signature,
)
from .montecarlo import EXPERIMENTS, SCHEMA, Z_FAIL, describe_experiments, estimate
from .polygons import PolygonShape, classify_polygon, edges_from_frames, polygon_from_frame
from .quadcells import (
    REFERENCE_KITE,
    align_edges,
    base_cell_samples,
    build_quad_cell_table,
    flag_mean,
    singular_values,
)
from .sampling import DEFAULT_SEED, SampleStream, sample_frames, sample_spheres
from .triangles import rotation_orbit_trace, triangle_from_sphere, triangle_quantities

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 2, 3
SEED_ENV = "GRASSPOLY_SEED"
DEFAULT_TRACE_POINT = (1 / math.sqrt(3),) * 3
DEFAULT_TRACE_AXIS = (-1.0, 1.0, -math.sqrt(2))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _vector(text):
    try:
        v = [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if len(v) != 3 or not all(map(math.isfinite, v)):
        raise argparse.ArgumentTypeError("expected three finite numbers x,y,z")
    return np.array(v)


def _positive_int(text):
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if k < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return k


def _nonnegative_int(text):
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if k < 0:
        raise argparse.ArgumentTypeError("expected a non-negative integer")
    return k


def _common():
    p = _Parser(add_help=False)
    p.add_argument("--seed", type=_nonnegative_int, default=None,
                   help=f"master seed (default ${SEED_ENV}, else {DEFAULT_SEED})")
    p.add_argument("--stream", "--streams", dest="stream", type=_nonnegative_int, default=0,
                   help="stream id within the seed (default 0)")
    p.add_argument("--workers", type=_positive_int, default=1,
                   help="worker substreams; results are fixed for a fixed count (default 1)")
    p.add_argument("--output", "-o", default=None, help="write to this path instead of stdout")
    return p


def _epilog():
    return "experiments (estimate --name):\n" + "\n".join("  " + s for s in describe_experiments())


def build_parser():
    common = _common()
    parser = _Parser(
        prog="grasspoly",
        description="Random polygons from the Grassmannian of 2-planes.",
        epilog=_epilog(), formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def add(name, help, formats, default):
        p = sub.add_parser(name, help=help, parents=[common], description=help,
                           epilog=_epilog() if name == "estimate" else None,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--format", choices=formats, default=default)
        return p

    p = add("sample", "draw random frames of G_2(R^n)", ("json", "csv"), "json")
    p.add_argument("--n", type=_positive_int, default=4)
    p.add_argument("--samples", type=_positive_int, default=10)

    p = add("triangle", "triangles of sphere points", ("json", "csv"), "json")
    p.add_argument("--point", type=_vector, default=None, help="x,y,z (normalized); else random")
    p.add_argument("--samples", type=_positive_int, default=10)

    p = add("estimate", "Monte Carlo estimate against an exact value",
            ("json", "jsonl", "csv", "table"), "json")
    p.add_argument("--name", required=True, choices=sorted(EXPERIMENTS))
    p.add_argument("--samples", type=_positive_int, default=1_000_000)
    p.add_argument("--n", type=_positive_int, default=None, help="edge count for convex-fraction")
    p.add_argument("--z-fail", type=float, default=Z_FAIL,
                   help=f"exit 3 if any |z| exceeds this (default {Z_FAIL})")

    p = add("trace", "vertex paths of a triangle under a sphere rotation", ("json", "csv"), "csv")
    p.add_argument("--point", type=_vector, default=np.array(DEFAULT_TRACE_POINT))
    p.add_argument("--axis", type=_vector, default=np.array(DEFAULT_TRACE_AXIS))
    p.add_argument("--steps", type=_positive_int, default=64)

    p = add("cells", "classify the 96 sign cells of G_2(R^4)", ("json", "csv", "svg"), "json")
    p.add_argument("--samples", type=_positive_int, default=1_000_000,
                   help="uniform draws; base-cell hits feed the flag mean")

    p = add("orbit", "B_n orbit of the positive chamber or base cell", ("json",), "json")
    p.add_argument("--n", type=_positive_int, default=4)
    p.add_argument("--mode", choices=("chamber", "cell"), default="chamber")

    p = add("stabilizer", "stabilizer of the positive chamber or base cell", ("json",), "json")
    p.add_argument("--n", type=_positive_int, default=4)
    p.add_argument("--mode", choices=("chamber", "cell"), default="chamber")

    p = add("flagmean", "flag mean of base-cell samples", ("json",), "json")
    p.add_argument("--samples", type=_positive_int, default=10_000)

    p = add("render", "draw random polygons", ("svg", "json"), "svg")
    p.add_argument("--n", type=_positive_int, default=5)
    p.add_argument("--samples", type=_positive_int, default=16)
    p.add_argument("--input", default=None,
                   help='JSON file of {"edges": ...} or a list of them; replaces sampling')

    p = add("verify", "run the invariant suites", ("json", "table"), "table")
    p.add_argument("--suite", choices=("all",) + tuple(gverify.SUITES), default="all")
    return parser


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return DEFAULT_SEED
    try:
        seed = int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer")
    if seed < 0:
        raise UsageError(f"{SEED_ENV} must be non-negative")
    return seed


def _json(obj):
    return gio.dumps(obj, indent=2) + "\n"


# -- subcommands -------------------------------------------------------------

def cmd_sample(args, stream):
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    F = sample_frames(args.n, stream, args.samples)
    if args.format == "csv":
        rows = [(k, i + 1, A[i, 0], A[i, 1]) for k, A in enumerate(F) for i in range(args.n)]
        return gio.table_csv(("sample", "row", "u", "v"), rows), EXIT_OK
    return _json(gio.frames_payload(F, stream.provenance())), EXIT_OK


TRIANGLE_COLUMNS = ("x", "y", "z", "a", "b", "c", "area", "circumcurvature", "class")


def cmd_triangle(args, stream):
    if args.point is not None:
        norm = np.linalg.norm(args.point)
        if norm == 0:
            raise UsageError("--point must be nonzero")
        P = (args.point / norm)[None]
    else:
        P = sample_spheres(stream, args.samples)
    records = []
    for p in P:
        t = triangle_from_sphere(p)
        q = triangle_quantities(t)
        records.append((*p.tolist(), *t.sides, q.area, q.circumcurvature,
                        q.classification.value))
    if args.format == "csv":
        return gio.table_csv(TRIANGLE_COLUMNS, records), EXIT_OK
    payload = {"provenance": stream.provenance(),
               "triangles": [dict(zip(TRIANGLE_COLUMNS, r)) for r in records]}
    return _json(payload), EXIT_OK


def cmd_estimate(args, stream):
    reports = estimate(args.name, args.samples, stream, workers=args.workers, n=args.n)
    failed = any(r.z_score is not None and abs(r.z_score) > args.z_fail for r in reports)
    code = EXIT_FAILED if failed else EXIT_OK
    header = ("name", "n_samples", "estimate", "std_error", "exact_value", "z_score")
    rows = [(r.name, r.n_samples, r.estimate, r.std_error, r.exact_value, r.z_score)
            for r in reports]
    if args.format == "csv":
        return gio.table_csv(header, rows), code
    if args.format == "jsonl":
        return "".join(gio.dumps(r.to_dict()) + "\n" for r in reports), code
    if args.format == "table":
        lines = ["{:<32s} {:>10s} {:>14s} {:>12s} {:>14s} {:>8s}".format(*header)]
        for name, k, est, se, exact, z in rows:
            lines.append(f"{name:<32s} {k:>10d} {est:>14.8f} {se:>12.3e} {exact:>14.8f} {z:>+8.2f}")
        lines.append("PASS" if code == EXIT_OK else f"FAIL (|z| > {args.z_fail})")
        return "\n".join(lines) + "\n", code
    return _json({"reports": reports, "passed": not failed}), code


def cmd_trace(args, stream):
    if np.linalg.norm(args.point) == 0 or np.linalg.norm(args.axis) == 0:
        raise UsageError("--point and --axis must be nonzero")
    point = args.point / np.linalg.norm(args.point)
    axis = args.axis / np.linalg.norm(args.axis)
    trace = rotation_orbit_trace(point, axis, args.steps)
    if args.format == "csv":
        return gio.trace_csv(trace), EXIT_OK
    return _json(gio.trace_payload(trace, point, axis)), EXIT_OK


def _base_cell_hits(stream, total):
    base = base_cell_signature()
    hits = []
    done = 0
    while done < total:
        k = min(250_000, total - done)
        F = sample_frames(4, stream, k)
        rows = sign_arrays(F, 0.0)
        target = np.asarray(signature_row(base), dtype=rows.dtype)
        hits.append(F[(rows == target).all(axis=1)])
        done += k
    hits = np.concatenate(hits)
    if len(hits) < 2:
        raise InsufficientSamplesError(
            f"{total} draws gave {len(hits)} base-cell hits; raise --samples")
    return hits


def cmd_cells(args, stream):
    hits = _base_cell_hits(stream, args.samples)
    table = build_quad_cell_table(representative=flag_mean(hits))
    if args.format == "svg":
        quads = table.permutation_images
        labels = ["".join(str(i + 1) for i in q.permutation) + " " + q.polygon_class.value
                  for q in quads]
        return gio.polygons_svg([q.polygon for q in quads], labels, columns=6), EXIT_OK
    if args.format == "csv":
        header = ("permutation", "class", "e1x", "e1y", "e2x", "e2y", "e3x", "e3y", "e4x", "e4y")
        rows = [("".join(str(i + 1) for i in q.permutation), q.polygon_class.value,
                 *q.polygon.edges.ravel().tolist()) for q in table.permutation_images]
        return gio.table_csv(header, rows), EXIT_OK
    payload = table.to_dict()
    payload["base_samples"] = int(len(hits))
    payload["provenance"] = {**stream.provenance(), "draws": args.samples}
    return _json(payload), EXIT_OK


def _target(n, mode):
    if mode == "cell":
        if n != 4:
            raise UsageError("--mode cell is only defined for --n 4")
        return base_cell_signature()
    if n < 3:
        raise UsageError("--n must be >= 3")
    return positive_chamber_signature(n)


def cmd_orbit(args, stream):
    orbit = orbit_of_signature(_target(args.n, args.mode), args.mode)
    payload = {"n": args.n, "mode": args.mode, "orbit_size": len(orbit),
               "signatures": [s.to_dict() for s in
                              sorted(orbit, key=lambda s: (s.plucker, s.projection))]}
    if args.mode == "chamber":
        payload["formula"] = chamber_count_formula(args.n)
    return _json(payload), EXIT_OK


def cmd_stabilizer(args, stream):
    report = stabilizer_of_signature(_target(args.n, args.mode), args.mode)
    return _json(report.to_dict()), EXIT_OK


def cmd_flagmean(args, stream):
    F = base_cell_samples(stream, args.samples)
    mean = flag_mean(F)
    edges = polygon_from_frame(mean).edges
    aligned, err = align_edges(edges, REFERENCE_KITE)
    payload = {"samples": args.samples, "frame": mean.to_dict(),
               "singular_values": singular_values(F)[:3].tolist(),
               "edges": edges.tolist(), "aligned_edges": aligned.tolist(),
               "reference_edges": REFERENCE_KITE.tolist(), "max_component_error": err,
               "class": classify_polygon(polygon_from_frame(mean)).value,
               "provenance": stream.provenance()}
    return _json(payload), EXIT_OK


def _read_polygons(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    items = data if isinstance(data, list) else data.get("polygons", [data])
    try:
        return [PolygonShape.from_dict(d) for d in items]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad polygon JSON in {path}: {exc}")


def cmd_render(args, stream):
    if args.input:
        polys = _read_polygons(args.input)
    else:
        if args.n < 3:
            raise UsageError("--n must be >= 3")
        polys = [PolygonShape(E) for E in edges_from_frames(sample_frames(args.n, stream, args.samples))]
    labels = [classify_polygon(p, closure_tol=1e-6).value for p in polys]
    if args.format == "json":
        return _json({"polygons": [{**p.to_dict(), "class": c} for p, c in zip(polys, labels)]}), EXIT_OK
    return gio.polygons_svg(polys, labels), EXIT_OK


def cmd_verify(args, stream):
    checks = gverify.run(args.suite, stream.seed)
    passed = all(c.passed for c in checks)
    code = EXIT_OK if passed else EXIT_FAILED
    if args.format == "json":
        return _json({"suite": args.suite, "seed": stream.seed, "passed": passed,
                      "checks": [c.to_dict() for c in checks]}), code
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.suite:10s} {c.name}  [{c.detail}]" for c in checks]
    lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n", code


COMMANDS = {"sample": cmd_sample, "triangle": cmd_triangle, "estimate": cmd_estimate,
            "trace": cmd_trace, "cells": cmd_cells, "orbit": cmd_orbit,
            "stabilizer": cmd_stabilizer, "flagmean": cmd_flagmean,
            "render": cmd_render, "verify": cmd_verify}


def _fail(kind, message):
    sys.stderr.write(json.dumps({"schema": SCHEMA, "error": kind, "message": message}) + "\n")
    return EXIT_INVALID


def run(argv=None):
    """Parse ``argv``, run the subcommand and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
        stream = SampleStream(_seed(args), args.stream)
        text, code = COMMANDS[args.command](args, stream)
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except UsageError as exc:
        return _fail("usage", str(exc))
    except GrassPolyError as exc:
        return _fail(type(exc).__name__, str(exc))
    if args.output:
        try:
            with open(args.output, "w") as fh:
                fh.write(text)
        except OSError as exc:
            return _fail("output", str(exc))
    else:
        sys.stdout.write(text)
    return code


def main():
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
