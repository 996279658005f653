"""Monte Carlo estimates of probabilities and expectations under the symmetric measure.

Each registered experiment draws sphere points or frames, maps them to a
per-sample quantity and reports the sample mean with its standard error and
the z-score against the exact value. Sums are accumulated chunk by chunk
with :func:`math.fsum` and merged with the pairwise (Chan) update, so the
result depends only on the seed, the sample count and the worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .exceptions import DomainError, InsufficientSamplesError, UnknownExperimentError
from .grassmann import row_keys, sign_arrays
from .polygons import classify_frames
from .sampling import SampleStream, sample_frames, sample_spheres
from .triangles import (
    areas_from_spheres,
    circumcurvatures_from_spheres,
    obtuse_indicator,
    obtuse_probability_exact,
    sides_from_spheres,
)

SCHEMA = "grasspoly/1"
CHUNK = 250_000
MIN_SAMPLES = 1_000
Z_FAIL = 4.0
CELLS_N4 = 96


@dataclass(frozen=True)
class EstimateReport:
    name: str
    n_samples: int
    estimate: float
    std_error: float
    exact_value: float | None = None
    z_score: float | None = None
    provenance: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.z_score is None or abs(self.z_score) <= Z_FAIL

    def within(self, k_sigma):
        return self.z_score is not None and abs(self.z_score) <= k_sigma

    def to_dict(self):
        d = asdict(self)
        d["schema"] = SCHEMA
        return d


class _Moments:
    """Count, mean and centred sum of squares, merged pairwise."""

    def __init__(self):
        self.n, self.mean, self.m2 = 0, 0.0, 0.0

    def add_chunk(self, x):
        x = np.asarray(x, dtype=float)
        k = len(x)
        if not k:
            return
        mean = math.fsum(x) / k
        m2 = math.fsum((x - mean) ** 2)
        self.merge(k, mean, m2)

    def merge(self, k, mean, m2):
        n = self.n + k
        delta = mean - self.mean
        self.mean = self.mean + delta * k / n
        self.m2 = self.m2 + m2 + delta * delta * self.n * k / n
        self.n = n

    @property
    def std_error(self):
        if self.n < 2:
            return float("nan")
        return math.sqrt(self.m2 / (self.n - 1) / self.n)


# -- per-sample quantities --------------------------------------------------

def _triangle_degenerate(P):
    return int((P == 0).any(axis=1).sum())


def _obtuse(stream, size, n):
    P = sample_spheres(stream, size)
    return {"obtuse": obtuse_indicator(sides_from_spheres(P))}, _triangle_degenerate(P)


def _area(stream, size, n):
    P = sample_spheres(stream, size)
    return {"area": areas_from_spheres(P)}, _triangle_degenerate(P)


def _circumcurvature(stream, size, n):
    P = sample_spheres(stream, size)
    return {"circumcurvature": circumcurvatures_from_spheres(P)}, _triangle_degenerate(P)


def _convex(stream, size, n):
    codes = classify_frames(sample_frames(n, stream, size), epsilon=0.0)
    return {f"convex-fraction(n={n})": (codes == 0).astype(float)}, int((codes == 3).sum())


def _quad(stream, size, n):
    codes = classify_frames(sample_frames(4, stream, size), epsilon=0.0)
    return ({"quad-classes:convex": (codes == 0).astype(float),
             "quad-classes:reflex": (codes == 1).astype(float),
             "quad-classes:self_intersecting": (codes == 2).astype(float)},
            int((codes == 3).sum()))


def _constant(stream, size, n):
    sample_spheres(stream, size)
    return {"constant": np.ones(size)}, 0


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    kernel: object
    exact: object
    default_n: int | None = None

    def targets(self, n=None):
        return self.exact(n if n is not None else self.default_n)


def _convex_exact(n):
    return {f"convex-fraction(n={n})": 2.0 / math.factorial(n - 1)}


EXPERIMENTS = {
    "obtuse": Experiment(
        "obtuse", "probability that a random perimeter-2 triangle is obtuse",
        _obtuse, lambda n: {"obtuse": obtuse_probability_exact()}),
    "area": Experiment(
        "area", "expected area of a random perimeter-2 triangle",
        _area, lambda n: {"area": 1 / (4 * math.pi)}),
    "circumcurvature": Experiment(
        "circumcurvature", "expected curvature of the circumcircle of a random triangle",
        _circumcurvature, lambda n: {"circumcurvature": math.pi / 2}),
    "convex-fraction": Experiment(
        "convex-fraction", "probability that a random n-gon is convex, 2/(n-1)!",
        _convex, _convex_exact, default_n=5),
    "quad-classes": Experiment(
        "quad-classes", "convex / reflex / self-intersecting quadrilateral frequencies",
        _quad, lambda n: {"quad-classes:convex": 1 / 3, "quad-classes:reflex": 1 / 3,
                          "quad-classes:self_intersecting": 1 / 3}),
    "cell-occupancy": Experiment(
        "cell-occupancy",
        "chi-square of the 96 sign-cell counts of G_2(R^4) against uniform",
        None, lambda n: {"cell-occupancy": CELLS_N4 - 1}),
    "constant": Experiment(
        "constant", "mean of the constant 1 (harness sanity check)",
        _constant, lambda n: {"constant": 1.0}),
}

NAMED_EXPERIMENTS = ("obtuse", "area", "circumcurvature", "convex-fraction",
                     "quad-classes", "cell-occupancy")


def _split(total, parts):
    base, extra = divmod(total, parts)
    return [base + (w < extra) for w in range(parts)]


def _run_worker(kernel, stream, size, n):
    moments, degenerate = {}, 0
    done = 0
    while done < size:
        k = min(CHUNK, size - done)
        values, deg = kernel(stream, k, n)
        degenerate += deg
        for key, x in values.items():
            moments.setdefault(key, _Moments()).add_chunk(x)
        done += k
    return moments, degenerate


def _map_workers(fn, streams, sizes):
    if len(streams) == 1:
        return [fn(streams[0], sizes[0])]
    with ThreadPoolExecutor(max_workers=len(streams)) as pool:
        return list(pool.map(fn, streams, sizes))


def _streams(stream, workers):
    if workers < 1:
        raise DomainError("workers must be >= 1")
    return [stream] if workers == 1 else stream.spawn(workers)


def estimate(name, n_samples=1_000_000, stream=None, workers=1, n=None):
    """Run a registered experiment; returns one report per estimand.

    Parameters
    ----------
    name : str
        Key of :data:`EXPERIMENTS`.
    n_samples : int
        At least 1000.
    stream : SampleStream, optional
    workers : int
        Number of substreams (threads). Results are reproducible for a
        fixed worker count.
    n : int, optional
        Edge count for ``convex-fraction`` (default 5).
    """
    if name not in EXPERIMENTS:
        raise UnknownExperimentError(f"unknown experiment {name!r}; known: {sorted(EXPERIMENTS)}")
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"n_samples must be >= {MIN_SAMPLES}")
    stream = stream if stream is not None else SampleStream()
    exp = EXPERIMENTS[name]
    n = n if n is not None else exp.default_n
    if name == "convex-fraction" and (n is None or n < 3):
        raise DomainError("convex-fraction needs n >= 3")
    if name == "cell-occupancy":
        return [cell_occupancy_report(n_samples, stream, workers)]

    streams = _streams(stream, workers)
    sizes = _split(n_samples, len(streams))
    results = _map_workers(lambda s, k: _run_worker(exp.kernel, s, k, n), streams, sizes)
    targets = exp.targets(n)
    reports = []
    prov = _provenance(stream, streams, workers)
    degenerate = sum(r[1] for r in results)
    for key, exact in targets.items():
        total = _Moments()
        for moments, _ in results:
            m = moments[key]
            total.merge(m.n, m.mean, m.m2)
        se = total.std_error
        z = (total.mean - exact) / se if se > 0 else None
        reports.append(EstimateReport(key, total.n, total.mean, se, exact, z, prov,
                                      {"degenerate": degenerate, "n": n}))
    return reports


def _provenance(stream, streams, workers):
    return {"seed": stream.seed, "stream": stream.stream_id, "workers": workers,
            "counters": [s.counter for s in streams]}


# -- sign cell occupancy ----------------------------------------------------

@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    p_value: float
    dof: int


def chi_square_uniformity(counts, min_expected=20):
    """Pearson chi-square of ``counts`` against the uniform distribution.

    Raises
    ------
    InsufficientSamplesError
        If the expected count per category is below ``min_expected``.
    """
    counts = np.asarray(counts, dtype=float)
    k = len(counts)
    if k < 2:
        raise DomainError("need at least two categories")
    expected = counts.sum() / k
    if expected < min_expected:
        raise InsufficientSamplesError(
            f"expected count {expected:.3g} per category is below {min_expected}")
    stat = float(((counts - expected) ** 2).sum() / expected)
    return ChiSquareResult(stat, float(stats.chi2.sf(stat, k - 1)), k - 1)


def cell_counts(n_samples, stream, workers=1):
    """Occupancy of the sign cells of G_2(R^4) by uniform frames.

    Returns ``(keys, counts, wall_hits)`` where ``keys`` are the byte keys
    of the canonical sign rows, sorted.
    """
    def work(s, size):
        tally, walls, done = {}, 0, 0
        while done < size:
            k = min(CHUNK, size - done)
            rows = sign_arrays(sample_frames(4, s, k), 0.0)
            open_ = (rows != 0).all(axis=1)
            walls += int((~open_).sum())
            keys, c = np.unique(row_keys(rows[open_]), return_counts=True)
            for key, cnt in zip(keys.tolist(), c.tolist()):
                tally[key] = tally.get(key, 0) + cnt
            done += k
        return tally, walls

    streams = _streams(stream, workers)
    results = _map_workers(work, streams, _split(n_samples, len(streams)))
    tally, walls = {}, 0
    for t, w in results:
        walls += w
        for key, c in t.items():
            tally[key] = tally.get(key, 0) + c
    keys = sorted(tally)
    return keys, np.array([tally[k] for k in keys]), walls


def cell_occupancy_report(n_samples, stream=None, workers=1):
    stream = stream if stream is not None else SampleStream()
    keys, counts, walls = cell_counts(n_samples, stream, workers)
    if len(counts) != CELLS_N4:
        raise InsufficientSamplesError(f"observed {len(counts)} cells, expected {CELLS_N4}")
    chi = chi_square_uniformity(counts)
    se = math.sqrt(2 * chi.dof)
    return EstimateReport(
        "cell-occupancy", int(counts.sum()), chi.statistic, se, float(chi.dof),
        (chi.statistic - chi.dof) / se,
        _provenance(stream, [stream], workers),
        {"p_value": chi.p_value, "dof": chi.dof, "cells": len(counts),
         "min_count": int(counts.min()), "max_count": int(counts.max()),
         "degenerate": walls})


# -- heavy tail of the circumradius ----------------------------------------

@dataclass(frozen=True)
class CircumcurvatureGuard:
    report: EstimateReport
    checkpoints: tuple

    @property
    def running_max_radius(self):
        return [r for _, r in self.checkpoints]


def circumcurvature_variance_guard(n_samples=1_000_000, stream=None):
    """Estimate E[circumcurvature] and track the running maximum circumradius.

    The curvature estimate is unclipped. The radius maximum keeps growing
    with the sample count because E[circumradius] diverges.
    """
    stream = stream if stream is not None else SampleStream()
    moments = _Moments()
    checkpoints, running, done = [], 0.0, 0
    marks = [10 ** k for k in range(3, 12) if 10 ** k < n_samples] + [n_samples]
    while done < n_samples:
        k = min(CHUNK, marks[0] - done)
        curv = circumcurvatures_from_spheres(sample_spheres(stream, k))
        moments.add_chunk(curv)
        running = max(running, float((1 / curv).max()))
        done += k
        if done == marks[0]:
            checkpoints.append((done, running))
            marks.pop(0)
    se = moments.std_error
    exact = math.pi / 2
    report = EstimateReport("circumcurvature", moments.n, moments.mean, se, exact,
                            (moments.mean - exact) / se, stream.provenance(),
                            {"max_circumradius": running})
    return CircumcurvatureGuard(report, tuple(checkpoints))


def describe_experiments():
    """One line per experiment with its exact target."""
    lines = []
    for name, exp in EXPERIMENTS.items():
        targets = exp.targets()
        shown = ", ".join(f"{v:.10g}" for v in targets.values())
        lines.append(f"{name:16s} {exp.description} (exact: {shown})")
    return lines
