"""Invariant suites behind ``grasspoly verify``.

These are reduced-size versions of the test suite's checks, meant for a
quick reproducibility audit from the command line.
"""

import math
from dataclasses import dataclass

import numpy as np

from .grassmann import (
    Frame,
    full_plucker,
    plucker_coordinates,
    plucker_from_frame,
    plucker_relation_residuals,
    recover_frame,
    row_keys,
    sign_arrays,
    sign_signature,
)
from .hyperoctahedral import (
    SignedPermutation,
    act_on_frames,
    base_cell_signature,
    count_cells_n4,
    count_chambers,
    elements,
    negation,
    positive_chamber_signature,
    reversal,
    stabilizer_of_signature,
)
from .montecarlo import NAMED_EXPERIMENTS, estimate
from .polygons import classify_frames, edges_from_frames, is_positive_grassmannian
from .quadcells import build_quad_cell_table, log_interpolate_cellpath
from .sampling import SampleStream, sample_frames, sample_many_in_signature, sample_spheres
from .triangles import (
    canonical_triangle,
    rotate_about_z,
    triangle_from_sphere,
    triangle_quantities,
    vertex_C_of_orbit,
)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str

    def to_dict(self):
        return {"suite": self.suite, "name": self.name, "passed": self.passed,
                "detail": self.detail}


def _check(suite, name, passed, detail):
    return Check(suite, name, bool(passed), detail)


def algebra(stream, count=1000):
    out = []
    for n in range(3, 9):
        F = sample_frames(n, stream, count)
        D = full_plucker(plucker_coordinates(F), n)
        proj = np.einsum("mik,mjk->mij", F, F)
        err = np.abs(proj + D @ D).max()
        out.append(_check("algebra", f"projection = -Delta^2 (n={n})", err < 1e-10, f"{err:.2e}"))
        res = np.abs(plucker_relation_residuals(plucker_coordinates(F), n)).max() if n >= 4 else 0.0
        out.append(_check("algebra", f"Plücker relations (n={n})", res < 1e-10, f"{res:.2e}"))
        worst = 0.0
        for A in F[:200]:
            frame = Frame.from_matrix(A, validate=False)
            back = recover_frame(plucker_from_frame(frame))
            worst = max(worst, float(np.abs(back.matrix @ back.matrix.T - A @ A.T).max()))
        out.append(_check("algebra", f"SVD round trip (n={n})", worst < 1e-9, f"{worst:.2e}"))
    return out


def groups(stream, count=500):
    out = []
    cc = count_chambers(4)
    out.append(_check("groups", "24 chambers in G_2(R^4)",
                      cc.formula == cc.orbit_stabilizer == cc.orbit_size == 24,
                      f"{cc.formula}/{cc.orbit_stabilizer}/{cc.orbit_size}"))
    cells = count_cells_n4()
    out.append(_check("groups", "96 sign cells", cells == 96, str(cells)))
    for n in (4, 5):
        order = stabilizer_of_signature(positive_chamber_signature(n), "chamber").stabilizer_order
        out.append(_check("groups", f"chamber stabilizer order 4n (n={n})", order == 4 * n, str(order)))
    stab = set(stabilizer_of_signature(base_cell_signature(), "cell").stabilizer_elements)
    want = {SignedPermutation.identity(4), negation(4), reversal(4), negation(4) * reversal(4)}
    out.append(_check("groups", "cell stabilizer {id, eta, gamma, eta gamma}", stab == want,
                      ", ".join(sorted(g.cycles() for g in stab))))
    F = sample_frames(4, stream, count)
    worst = 0.0
    for g in list(elements(4))[::7]:
        lhs = plucker_coordinates(act_on_frames(g, F))
        D = full_plucker(plucker_coordinates(F), 4)
        s, p = g.signs, g.perm
        iu = np.triu_indices(4, 1)
        rhs = (s[:, None] * s[None, :] * D[:, p][:, :, p])[:, iu[0], iu[1]]
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    out.append(_check("groups", "functoriality of the B_4 action", worst < 1e-12, f"{worst:.2e}"))
    return out


def triangles(stream, count=1000):
    out = []
    P = sample_spheres(stream, count)
    worst = 0.0
    for p in P:
        q = triangle_quantities(p)
        if q.exradii:
            worst = max(worst, abs(q.inradius * math.prod(q.exradii) - q.area ** 2))
    out.append(_check("triangles", "r r_a r_b r_c = area^2", worst < 1e-9, f"{worst:.2e}"))
    worst = 0.0
    for p in P[:200]:
        ref = triangle_from_sphere(p).sides
        for signs in np.array(np.meshgrid([1, -1], [1, -1], [1, -1])).T.reshape(-1, 3):
            worst = max(worst, float(np.abs(np.subtract(triangle_from_sphere(p * signs).sides, ref)).max()))
    out.append(_check("triangles", "octant symmetry", worst == 0.0, f"{worst:.2e}"))
    rng = stream.rng
    worst = 0.0
    for z, theta in zip(rng.uniform(-0.99, 0.99, count), rng.uniform(0, 2 * math.pi, count)):
        p = np.array([math.sqrt(1 - z * z), 0.0, z])
        C = canonical_triangle(rotate_about_z(p, theta))[2]
        worst = max(worst, float(np.abs(C - vertex_C_of_orbit(z, theta)).max()))
    out.append(_check("triangles", "vertex C follows the ellipse", worst < 1e-9, f"{worst:.2e}"))
    return out


def polygons(stream, count=20_000):
    out = []
    F = sample_frames(6, stream, count)
    E = edges_from_frames(F)
    closure = np.abs(E.sum(axis=1)).max()
    perim = np.abs(np.linalg.norm(E, axis=2).sum(axis=1) - 2).max()
    out.append(_check("polygons", "closure and perimeter 2", max(closure, perim) < 1e-12,
                      f"{closure:.2e}, {perim:.2e}"))
    F4 = sample_frames(4, stream, count)
    pos = np.array([is_positive_grassmannian(A) for A in F4[:5000]])
    codes = classify_frames(F4[:5000])
    out.append(_check("polygons", "positive Grassmannian implies convex",
                      (codes[pos] == 0).all(), f"{int(pos.sum())} positive frames"))
    flips = stream.rng.choice([-1.0, 1.0], size=(count, 4))
    same = np.abs(edges_from_frames(F4 * flips[:, :, None]) - edges_from_frames(F4)).max()
    out.append(_check("polygons", "row sign flips fix the polygon", same == 0.0, f"{same:.2e}"))
    return out


def cells(stream, count=20_000, pairs=50):
    out = []
    table = build_quad_cell_table(stream, 2_000)
    counts = [v for v in table.counts().values()]
    out.append(_check("cells", "32/32/32 cell classes", counts == [32, 32, 32], str(counts)))
    F = sample_frames(4, stream, count)
    rows = sign_arrays(F, 0.0)
    codes = classify_frames(F, 0.0)
    keys = row_keys(rows)
    seen, clash = {}, 0
    for k, c in zip(keys.tolist(), codes.tolist()):
        clash += seen.setdefault(k, c) != c
    out.append(_check("cells", "class constant on cells", clash == 0 and len(seen) == 96,
                      f"{len(seen)} cells, {clash} clashes"))
    bad = 0
    for A in F[:pairs]:
        frame = Frame.from_matrix(A, validate=False)
        sig = sign_signature(frame, 0.0)
        B = sample_many_in_signature(4, sig, stream, 1)[0]
        path = log_interpolate_cellpath(frame, Frame.from_matrix(B, validate=False), 100)
        bad += int((row_keys(path.signatures()) != row_keys(sign_arrays(A[None], 0.0))[0]).sum())
    out.append(_check("cells", "log paths stay in their cell", bad == 0, f"{bad} violations"))
    return out


def estimators(stream, count=100_000):
    out = []
    for name in NAMED_EXPERIMENTS:
        n = 5 if name == "convex-fraction" else None
        size = count * 10 if name == "cell-occupancy" else count
        for r in estimate(name, size, SampleStream(stream.seed, stream.stream_id + 1), n=n):
            out.append(_check("estimators", r.name, r.ok, f"z = {r.z_score:+.2f}"))
    return out


SUITES = {"algebra": algebra, "groups": groups, "triangles": triangles,
          "polygons": polygons, "cells": cells, "estimators": estimators}


def run(suite="all", seed=None):
    names = list(SUITES) if suite == "all" else [suite]
    checks = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; known: all, {', '.join(SUITES)}")
        stream = SampleStream(seed) if seed is not None else SampleStream()
        checks.extend(SUITES[name](stream))
    return checks
