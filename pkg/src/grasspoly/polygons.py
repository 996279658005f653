"""Planar polygons obtained by squaring frame rows.

Row ``i`` of a frame, read as ``z_i = u_i + i v_i``, gives the edge
``e_i = z_i^2 = (u_i^2 - v_i^2, 2 u_i v_i)``. Orthonormality of the frame
is exactly closure plus perimeter 2.

The classifier here is purely geometric (cross products, turning number and
segment intersections) and shares nothing with the sign-cell machinery, so
it can serve as an independent check of it.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._validation import check_edges, check_frames, check_n
from .exceptions import BoundaryError, DegenerateLiftError, InvalidPolygonError
from .grassmann import Frame, plucker_coordinates

CLOSURE_TOL = 1e-10
DEFAULT_EPS = 1e-10
ORIENT_TOL = 1e-12
TURNING_TOL = 1e-6


class PolygonClass(str, Enum):
    CONVEX = "convex"
    REFLEX = "reflex"
    SELF_INTERSECTING = "self_intersecting"
    DEGENERATE = "degenerate"


CLASS_CODES = (PolygonClass.CONVEX, PolygonClass.REFLEX,
               PolygonClass.SELF_INTERSECTING, PolygonClass.DEGENERATE)


@dataclass(frozen=True, eq=False)
class PolygonShape:
    """Closed polygon given by its edge vectors; the first vertex is the origin."""

    edges: np.ndarray

    def __post_init__(self):
        e = np.array(self.edges, dtype=float)
        if e.ndim != 2 or e.shape[1] != 2 or len(e) < 3:
            raise InvalidPolygonError(f"need at least 3 edge vectors, got shape {e.shape}")
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def n(self):
        return len(self.edges)

    @property
    def vertices(self):
        return np.vstack([np.zeros(2), np.cumsum(self.edges, axis=0)[:-1]])

    @property
    def closure_error(self):
        return float(np.abs(self.edges.sum(axis=0)).max())

    @property
    def perimeter(self):
        return float(np.linalg.norm(self.edges, axis=1).sum())

    def zero_edges(self, tol=1e-12):
        return np.flatnonzero(np.linalg.norm(self.edges, axis=1) <= tol)

    def rotated(self, angle):
        c, s = math.cos(angle), math.sin(angle)
        return PolygonShape(self.edges @ np.array([[c, s], [-s, c]]))

    def permuted(self, order):
        return PolygonShape(self.edges[list(order)])

    def to_dict(self):
        return {"edges": self.edges.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["edges"])


def edges_from_frames(frames):
    """Edge vectors for a stack of frames: ``(m, n, 2) -> (m, n, 2)``."""
    A = np.asarray(frames, dtype=float)
    u, v = A[..., 0], A[..., 1]
    return np.stack([u * u - v * v, 2 * u * v], axis=-1)


def polygon_from_frame(frame):
    A = frame.matrix if isinstance(frame, Frame) else check_frames(frame)[0]
    return PolygonShape(edges_from_frames(A[None])[0])


def rotate_frame_in_plane(frame, phi):
    return frame.rotated(phi)


@dataclass(frozen=True)
class RotationCheck:
    phi: float
    max_vertex_error: float

    @property
    def ok(self):
        return self.max_vertex_error < 1e-10


def in_plane_rotation_acts_as_polygon_rotation(frame, phi):
    """Compare the polygon of the ``phi``-rotated frame with the polygon rotated by ``2 phi``.

    Rotating the basis by ``phi`` multiplies every ``z_i`` by ``e^{-i phi}``
    under :meth:`Frame.rotated`, so the edges turn by ``-2 phi``.
    """
    before = polygon_from_frame(frame)
    after = polygon_from_frame(frame.rotated(phi))
    expected = before.rotated(-2 * phi)
    err = np.abs(after.vertices - expected.vertices).max()
    return RotationCheck(phi, float(err))


def frame_from_polygon(edges, semicircular=True):
    """A frame whose squared rows are ``edges`` (a closed, perimeter-2 polygon).

    With ``semicircular=True`` the square roots are chosen so that all rows
    lie in the half-plane counterclockwise from the first row.
    """
    E = np.asarray(edges, dtype=float)
    r = np.linalg.norm(E, axis=1)
    ang = np.arctan2(E[:, 1], E[:, 0])
    if semicircular:
        ang = ang[0] + np.mod(ang - ang[0], 2 * math.pi)
    half = ang / 2
    A = np.sqrt(r)[:, None] * np.column_stack([np.cos(half), np.sin(half)])
    return Frame.from_matrix(A)


# -- classification ---------------------------------------------------------

def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _segments_state(p1, p2, p3, p4, tol):
    """0 = disjoint, 1 = proper crossing, 2 = touching/collinear contact."""
    d1 = _cross(p4 - p3, p1 - p3)
    d2 = _cross(p4 - p3, p2 - p3)
    d3 = _cross(p2 - p1, p3 - p1)
    d4 = _cross(p2 - p1, p4 - p1)
    proper = (((d1 > tol) & (d2 < -tol)) | ((d1 < -tol) & (d2 > tol))) & \
             (((d3 > tol) & (d4 < -tol)) | ((d3 < -tol) & (d4 > tol)))

    def on_segment(a, b, q, d):
        lo = np.minimum(a, b) - tol
        hi = np.maximum(a, b) + tol
        inside = np.all((q >= lo) & (q <= hi), axis=-1)
        return (np.abs(d) <= tol) & inside

    touch = (on_segment(p3, p4, p1, d1) | on_segment(p3, p4, p2, d2)
             | on_segment(p1, p2, p3, d3) | on_segment(p1, p2, p4, d4))
    return np.where(proper, 1, np.where(touch, 2, 0))


def classify_edges(edges, epsilon=DEFAULT_EPS):
    """Vectorized classifier: ``(m, n, 2)`` edges to integer codes.

    Codes index :data:`CLASS_CODES`: 0 convex, 1 reflex,
    2 self-intersecting, 3 degenerate. Closure is not checked here.
    """
    E = check_edges(edges)
    m, n, _ = E.shape
    lengths = np.linalg.norm(E, axis=2)
    nxt = np.roll(E, -1, axis=1)
    cross = _cross(E, nxt)
    dot = np.einsum("mkc,mkc->mk", E, nxt)
    scale = lengths * np.roll(lengths, -1, axis=1)
    degenerate = (lengths < epsilon).any(axis=1) | \
        (np.abs(cross) <= epsilon * np.maximum(scale, epsilon)).any(axis=1)

    V = np.concatenate([np.zeros((m, 1, 2)), np.cumsum(E, axis=1)[:, :-1]], axis=1)
    W = np.roll(V, -1, axis=1)
    crossing = np.zeros(m, dtype=bool)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            state = _segments_state(V[:, i], W[:, i], V[:, j], W[:, j], ORIENT_TOL)
            crossing |= state == 1
            degenerate |= state == 2

    turning = np.arctan2(cross, dot).sum(axis=1)
    same_sign = (cross > 0).all(axis=1) | (cross < 0).all(axis=1)
    convex = same_sign & (np.abs(np.abs(turning) - 2 * math.pi) < TURNING_TOL)

    codes = np.where(crossing, 2, np.where(convex, 0, 1))
    return np.where(degenerate, 3, codes).astype(np.int8)


def classify_polygon(poly, epsilon=DEFAULT_EPS, closure_tol=CLOSURE_TOL):
    """Convex, reflex, self-intersecting or degenerate.

    Degenerate means a near-zero edge, adjacent edges parallel or
    antiparallel within ``epsilon`` (relative), or two non-adjacent edges
    touching without crossing.

    Raises
    ------
    InvalidPolygonError
        If the edges do not sum to zero within ``closure_tol`` (relative
        to the perimeter when it exceeds 1).
    """
    if not isinstance(poly, PolygonShape):
        poly = PolygonShape(poly)
    if poly.closure_error > closure_tol * max(1.0, poly.perimeter):
        raise InvalidPolygonError(f"polygon does not close (error {poly.closure_error:.3g})")
    return CLASS_CODES[int(classify_edges(poly.edges[None], epsilon)[0])]


def classify_frames(frames, epsilon=DEFAULT_EPS):
    """Integer class codes for a stack of frames."""
    return classify_edges(edges_from_frames(frames), epsilon)


# -- lifts and the positive Grassmannian ------------------------------------

def is_semicircular_lift(frame):
    """Whether all rows lie counterclockwise within ``[0, pi)`` of the first row.

    Raises
    ------
    DegenerateLiftError
        If some row is (numerically) zero.
    """
    A = frame.matrix if isinstance(frame, Frame) else np.asarray(frame, dtype=float)
    if (np.linalg.norm(A, axis=1) <= 1e-12).any():
        raise DegenerateLiftError("frame has a zero row")
    r0 = A[0]
    ang = np.arctan2(_cross(r0, A), A @ r0)
    return bool(np.all((ang >= 0) & (ang < math.pi)))


class Positivity(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NO = "no"


def positivity(frame, tol=1e-12):
    """Tri-state membership in the positive Grassmannian.

    ``NEGATIVE`` means all upper Plücker coordinates are negative, i.e. the
    plane is positive but the basis has the other orientation.

    Raises
    ------
    BoundaryError
        If some ``|Delta_ij| < tol``.
    """
    A = frame.matrix if isinstance(frame, Frame) else check_frames(frame)[0]
    P = plucker_coordinates(A[None])[0]
    if (np.abs(P) < tol).any():
        raise BoundaryError("a Plücker coordinate vanishes; membership is indeterminate")
    if (P > 0).all():
        return Positivity.POSITIVE
    if (P < 0).all():
        return Positivity.NEGATIVE
    return Positivity.NO


def is_positive_grassmannian(frame, tol=1e-12):
    return positivity(frame, tol) is not Positivity.NO


def convex_fraction_exact(n):
    """Probability ``2/(n-1)!`` that a random n-gon is convex."""
    n = check_n(n)
    return 2.0 / math.factorial(n - 1)


def positive_frame(n, rng=None):
    """A frame in the positive Grassmannian: semicircular lift of a random convex n-gon."""
    rng = np.random.default_rng(rng)
    ang = np.sort(rng.uniform(0, math.pi, n))
    w = rng.uniform(0.2, 1.0, n)
    Z = np.sqrt(w)[:, None] * np.column_stack([np.cos(ang), np.sin(ang)])
    # orthonormalize while keeping each row's direction: A -> A (A^T A)^(-1/2)
    G = Z.T @ Z
    evals, evecs = np.linalg.eigh(G)
    A = Z @ evecs @ np.diag(evals ** -0.5) @ evecs.T
    return Frame.from_matrix(A)
