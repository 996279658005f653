"""Sign cells of G_2(R^4) and the quadrilaterals they carry.

G_2(R^4) splits into 96 sign cells, all images of the base cell under B_4.
Within a cell, quadrilaterals never change between convex, reflex and
self-intersecting, so the class of each cell can be read off a single
representative. This module builds that table and the tools around it:
the explicit projection formula, logarithmic paths inside a cell, the flag
mean, and congruence testing.
"""

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import (
    CellMismatchError,
    ConsistencyError,
    DegenerateMeanError,
    DomainError,
)
from .grassmann import (
    Frame,
    PluckerMatrix,
    ProjectionMatrix,
    plucker_coordinates,
    plucker_from_frame,
    plucker_relation_residuals,
    row_keys,
    signature_key,
    sign_signature,
    signature_from_row,
    signature_row,
    upper_indices_with_diagonal,
)
from .hyperoctahedral import (
    SignedPermutation,
    act_on_frame,
    act_on_plucker,
    act_on_signature,
    base_cell_signature,
    elements,
)
from .polygons import (
    PolygonClass,
    PolygonShape,
    classify_polygon,
    polygon_from_frame,
)
from .sampling import sample_many_in_signature

GAP_TOL = 1e-9


def projection_from_plucker_n4(plucker):
    """``A A^T`` written out in the Plücker coordinates of a plane in R^4."""
    if plucker.n != 4:
        raise DomainError(f"formula is specific to n = 4, got n = {plucker.n}")
    d12, d13, d14, d23, d24, d34 = plucker.upper
    D = plucker.full()
    M = np.diag((D ** 2).sum(axis=1))
    off = {
        (0, 1): d13 * d23 + d14 * d24,
        (0, 2): d14 * d34 - d12 * d23,
        (0, 3): -d12 * d24 - d13 * d34,
        (1, 2): d12 * d13 + d24 * d34,
        (1, 3): d12 * d14 - d23 * d34,
        (2, 3): d13 * d14 + d23 * d24,
    }
    for (i, j), val in off.items():
        M[i, j] = M[j, i] = val
    return ProjectionMatrix(M)


def projection_signs_from_upper(upper, n):
    """Signs of the upper triangle (with diagonal) of ``-Delta^2``."""
    D = np.zeros(upper.shape[:-1] + (n, n))
    i, j = np.triu_indices(n, 1)
    D[..., i, j] = upper
    D[..., j, i] = -upper
    P = -(D @ D)
    a, b = upper_indices_with_diagonal(n)
    return np.sign(P[..., a, b]).astype(np.int8)


# -- logarithmic interpolation ----------------------------------------------

@lru_cache(maxsize=None)
def chart_element(signature):
    """An element ``g`` of B_4 taking ``signature`` to the base cell."""
    base = base_cell_signature()
    signature = signature.canonicalize()
    for g in elements(4):
        if act_on_signature(g, signature) == base:
            return g
    raise CellMismatchError(f"{signature} is not an open sign cell of G_2(R^4)")


def _normalized(upper):
    return upper / np.sqrt((upper ** 2).sum(axis=-1, keepdims=True))


@dataclass(frozen=True, eq=False)
class CellPath:
    """Samples ``(t, Delta(t))`` of a path inside one sign cell."""

    start: PluckerMatrix
    end: PluckerMatrix
    t: np.ndarray
    upper: np.ndarray
    chart: SignedPermutation
    positive_upper: np.ndarray = field(repr=False)

    @property
    def samples(self):
        return [(float(t), PluckerMatrix(4, u)) for t, u in zip(self.t, self.upper)]

    def relation_residuals(self):
        return np.abs(plucker_relation_residuals(self.upper, 4)).max(axis=1)

    def signatures(self):
        """Canonical sign rows of every sample, shape ``(steps, 16)``."""
        sp = np.sign(self.upper).astype(np.int8)
        lead = np.where(sp[:, 0] < 0, -1, 1).astype(np.int8)
        return np.concatenate([sp * lead[:, None],
                               projection_signs_from_upper(self.upper, 4)], axis=1)

    def quotient_margins(self):
        """``Delta14/Delta23 - max(Delta12/Delta34, Delta34/Delta12)`` in the positive chart."""
        d12, d13, d14, d23, d24, d34 = self.positive_upper.T
        return d14 / d23 - np.maximum(d12 / d34, d34 / d12)


def log_interpolate_cellpath(start, end, steps):
    """Join two planes of the same sign cell by a logarithmic path.

    Both endpoints are first moved into the base cell, where every upper
    Plücker coordinate is positive. There each coordinate except
    ``Delta_24`` is interpolated as ``D0^(1-t) D1^t``. ``Delta_24`` is then
    solved from the Plücker relation. The samples are mapped back and
    normalized to unit Plücker norm.

    ``start`` and ``end`` may be frames or Plücker matrices.

    Raises
    ------
    CellMismatchError
        If the endpoints lie in different cells.
    DomainError
        If an endpoint lies on a wall.
    """
    if steps < 2:
        raise DomainError("steps must be at least 2")
    d0, d1 = (_as_plucker(x) for x in (start, end))
    if d0.n != 4 or d1.n != 4:
        raise DomainError("logarithmic cell paths are implemented for n = 4")
    s0, s1 = _signature_of(d0), _signature_of(d1)
    if s0 != s1:
        raise CellMismatchError("endpoints lie in different sign cells")
    g = chart_element(s0)
    p0, p1 = (_positive(act_on_plucker(g, d).upper) for d in (d0, d1))

    t = np.linspace(0.0, 1.0, steps)
    logs = np.log(p0)[None] * (1 - t)[:, None] + np.log(p1)[None] * t[:, None]
    P = np.exp(logs)
    d12, d13, d14, d23, _, d34 = P.T
    P[:, 4] = (d12 * d34 + d14 * d23) / d13
    P = _normalized(P)

    ginv = g.inverse()
    back = np.array([act_on_plucker(ginv, PluckerMatrix(4, row)).upper for row in P])
    ref = d0.upper / np.linalg.norm(d0.upper)
    back *= np.where(back @ ref < 0, -1.0, 1.0)[:, None]
    return CellPath(d0, d1, t, back, g, P)


def _as_plucker(x):
    return x if isinstance(x, PluckerMatrix) else plucker_from_frame(x)


def _signature_of(plucker):
    row = np.concatenate([
        np.sign(plucker.upper).astype(np.int8),
        projection_signs_from_upper(plucker.upper[None], plucker.n)[0]])
    if (row[:6] == 0).any():
        raise DomainError("endpoint lies on a Plücker wall")
    sig = signature_from_row(row, plucker.n).canonicalize()
    if not sig.is_open:
        raise DomainError("endpoint lies on a projection wall")
    return sig


def _positive(upper):
    upper = upper if upper[0] > 0 else -upper
    if (upper <= 0).any():
        raise DomainError("coordinates are not all positive in the base-cell chart")
    return upper


# -- flag mean ----------------------------------------------------------------

def flag_mean(frames):
    """Plane spanned by the top two left singular vectors of ``(A_1 ... A_m)``.

    The basis is oriented so that its first nonzero Plücker coordinate is
    positive.

    Raises
    ------
    DegenerateMeanError
        If the second and third singular values differ by less than 1e-9.
    """
    F = _stack(frames)
    if not len(F):
        raise DomainError("flag mean of an empty collection")
    n = F.shape[1]
    M = F.transpose(1, 0, 2).reshape(n, -1)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if len(s) > 2 and s[1] - s[2] < GAP_TOL * max(s[0], 1.0):
        raise DegenerateMeanError(f"no gap between singular values {s[1]:.6g} and {s[2]:.6g}")
    A = U[:, :2]
    P = plucker_coordinates(A[None])[0]
    nz = np.flatnonzero(P)
    if len(nz) and P[nz[0]] < 0:
        A = A[:, ::-1]
    return Frame.from_matrix(A, validate=False)


def _stack(frames):
    if isinstance(frames, np.ndarray):
        return frames.reshape(-1, *frames.shape[-2:])
    return np.stack([f.matrix if isinstance(f, Frame) else np.asarray(f) for f in frames])


def singular_values(frames):
    F = _stack(frames)
    return np.linalg.svd(F.transpose(1, 0, 2).reshape(F.shape[1], -1), compute_uv=False)


# -- congruence -----------------------------------------------------------------

def _shape_sequence(edges):
    nxt = np.roll(edges, -1, axis=0)
    turns = np.arctan2(edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0],
                       (edges * nxt).sum(axis=1))
    return np.column_stack([np.linalg.norm(edges, axis=1), turns])


def _variants(edges):
    mirror = edges * np.array([1.0, -1.0])
    for base in (edges, edges[::-1], mirror, mirror[::-1]):
        seq = _shape_sequence(base)
        for k in range(len(seq)):
            yield np.roll(seq, -k, axis=0)


def congruent(p, q, tol=1e-9):
    """Whether two polygons agree up to rigid motion, reflection and edge relabeling by D_n."""
    a = p.edges if isinstance(p, PolygonShape) else np.asarray(p, dtype=float)
    b = q.edges if isinstance(q, PolygonShape) else np.asarray(q, dtype=float)
    if a.shape != b.shape:
        return False
    target = _shape_sequence(a)
    return any(np.abs(v - target).max() <= tol for v in _variants(b))


def congruence_classes_of_orbit(quads, tol=1e-9):
    """Partition polygons into congruence classes; returns lists of indices."""
    classes = []
    for k, q in enumerate(quads):
        for cls in classes:
            if congruent(quads[cls[0]], q, tol):
                cls.append(k)
                break
        else:
            classes.append([k])
    return classes


def dihedral_permutations(n=4):
    """The 2n edge relabelings generated by cyclic shift and reversal, 0-based."""
    out = []
    for k in range(n):
        rot = tuple((i + k) % n for i in range(n))
        out.append(rot)
        out.append(tuple(reversed(rot)))
    return out


A3_TRANSVERSAL = ((0, 1, 2, 3), (1, 2, 0, 3), (2, 0, 1, 3))


# -- the 96-cell table ------------------------------------------------------

@dataclass(frozen=True)
class QuadCell:
    signature: object
    polygon_class: PolygonClass
    representative: Frame


@dataclass(frozen=True)
class PermutedQuad:
    permutation: tuple
    polygon: PolygonShape
    polygon_class: PolygonClass


@dataclass(frozen=True)
class QuadCellTable:
    entries: tuple
    base_representative: Frame
    permutation_images: tuple
    base_samples: int

    def counts(self):
        out = {c: 0 for c in (PolygonClass.CONVEX, PolygonClass.REFLEX,
                              PolygonClass.SELF_INTERSECTING)}
        for e in self.entries:
            out[e.polygon_class] = out.get(e.polygon_class, 0) + 1
        return out

    def permutation_counts(self):
        out = {c: 0 for c in (PolygonClass.CONVEX, PolygonClass.REFLEX,
                              PolygonClass.SELF_INTERSECTING)}
        for p in self.permutation_images:
            out[p.polygon_class] = out.get(p.polygon_class, 0) + 1
        return out

    def lookup(self):
        """Dict from canonical signature to polygon class."""
        return {e.signature: e.polygon_class for e in self.entries}

    def to_dict(self):
        return {
            "base_samples": self.base_samples,
            "base_representative": self.base_representative.to_dict(),
            "counts": {k.value: v for k, v in self.counts().items()},
            "cells": [{"signature": e.signature.to_dict(),
                       "class": e.polygon_class.value,
                       "edges": polygon_from_frame(e.representative).edges.tolist()}
                      for e in self.entries],
            "permutations": [{"permutation": [i + 1 for i in p.permutation],
                              "class": p.polygon_class.value,
                              "edges": p.polygon.edges.tolist()}
                             for p in self.permutation_images],
        }


def base_cell_samples(stream, count):
    return sample_many_in_signature(4, base_cell_signature(), stream, count)


def base_cell_flag_mean(stream, count=10_000):
    """Flag mean of ``count`` rejection samples from the base cell."""
    return flag_mean(base_cell_samples(stream, count))


def build_quad_cell_table(stream=None, count=10_000, representative=None):
    """Classify all 96 sign cells from one base-cell representative.

    The representative (by default the flag mean of ``count`` base-cell
    samples) is moved by all 384 elements of B_4. Each image lands in some
    cell and is classified geometrically. Every cell must be reached exactly
    four times with a single class.

    Raises
    ------
    ConsistencyError
        If the representative is not in the base cell, or a cell gets two
        classes, or the cell count is not 96.
    """
    if representative is None:
        representative = base_cell_flag_mean(stream, count)
    base = base_cell_signature()
    if sign_signature(representative, 0.0) != base:
        raise ConsistencyError("representative is not inside the base sign cell")

    seen = {}
    for g in elements(4):
        image = act_on_frame(g, representative)
        sig = sign_signature(image, 0.0)
        cls = classify_polygon(polygon_from_frame(image))
        if sig in seen:
            if seen[sig][0] is not cls:
                raise ConsistencyError(f"cell {sig} holds both {seen[sig][0]} and {cls}")
            seen[sig][2] += 1
        else:
            seen[sig] = [cls, image, 1]
    if len(seen) != 96 or any(v[2] != 4 for v in seen.values()):
        raise ConsistencyError(f"expected 96 cells hit 4 times each, got {len(seen)} cells")

    entries = tuple(QuadCell(sig, v[0], v[1]) for sig, v in seen.items())
    poly = polygon_from_frame(representative)
    perms = tuple(
        PermutedQuad(p, poly.permuted(p), classify_polygon(poly.permuted(p)))
        for p in itertools.permutations(range(4)))
    return QuadCellTable(entries, representative, perms,
                         count if stream is not None else 0)


def align_edges(edges, reference, reflect=True):
    """Rotate (and if better and ``reflect``, reflect) ``edges`` onto ``reference``.

    Returns ``(aligned, max_abs_error)``. The rotation is the least-squares
    optimum, found in closed form from complex inner products.
    """
    E = np.asarray(edges, dtype=float)
    R = np.asarray(reference, dtype=float)
    best = None
    for cand in (E, E * np.array([1.0, -1.0])) if reflect else (E,):
        z = cand[:, 0] + 1j * cand[:, 1]
        w = R[:, 0] + 1j * R[:, 1]
        phase = np.vdot(z, w)
        rot = phase / abs(phase) if abs(phase) > 0 else 1.0
        zr = z * rot
        aligned = np.column_stack([zr.real, zr.imag])
        err = float(np.abs(aligned - R).max())
        if best is None or err < best[1]:
            best = (aligned, err)
    return best


REFERENCE_KITE = np.array([[0.33, -0.59], [-0.29, -0.13], [-0.30, 0.11], [0.26, 0.62]])


def classes_from_sign_rows(rows, lookup):
    """Map canonical sign rows to polygon classes via a cell table lookup."""
    keys = {signature_key(sig): cls for sig, cls in lookup.items()}
    return [keys.get(k) for k in row_keys(rows).tolist()]

