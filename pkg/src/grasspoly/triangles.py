"""Triangles of perimeter 2 parametrized by the unit sphere.

A point ``(x, y, z)`` on the sphere gives the sidelengths
``a = 1 - x^2, b = 1 - y^2, c = 1 - z^2``, so ``x^2, y^2, z^2`` are the split
semiperimeters ``s_a, s_b, s_c``. Under the uniform measure on the sphere
these are Dirichlet(1/2, 1/2, 1/2) distributed.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import DegenerateEdgeError, DomainError

SPHERE_TOL = 1e-12
CLASSIFY_TOL = 1e-12
EDGE_TOL = 1e-9


class TriangleClass(str, Enum):
    ACUTE = "acute"
    RIGHT = "right"
    OBTUSE = "obtuse"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class TriangleShape:
    a: float
    b: float
    c: float

    @property
    def sides(self):
        return (self.a, self.b, self.c)

    @property
    def split_semiperimeters(self):
        """``(s_a, s_b, s_c)``; they sum to the semiperimeter 1."""
        a, b, c = self.sides
        return ((-a + b + c) / 2, (a - b + c) / 2, (a + b - c) / 2)


@dataclass(frozen=True)
class TriangleQuantities:
    area: float
    inradius: float
    exradii: tuple | None
    circumcurvature: float | None
    classification: TriangleClass

    @property
    def circumradius(self):
        if not self.circumcurvature:
            return None
        return 1.0 / self.circumcurvature


def _point(p):
    p = np.asarray(p, dtype=float)
    if p.shape != (3,):
        raise DomainError(f"sphere point must have 3 coordinates, got shape {p.shape}")
    if abs(p @ p - 1.0) > SPHERE_TOL * 10:
        raise DomainError(f"point {p.tolist()} is not on the unit sphere")
    return p


def triangle_from_sphere(p):
    x, y, z = _point(p)
    return TriangleShape(1 - x * x, 1 - y * y, 1 - z * z)


def sides_from_spheres(P):
    """Vectorized sidelengths for points of shape ``(m, 3)``."""
    return 1.0 - np.asarray(P) ** 2


def classify_sides(a, b, c, tol=CLASSIFY_TOL):
    sides = sorted((a, b, c))
    s = 0.5 * sum(sides)
    if sides[0] <= tol or s - sides[2] <= tol:
        return TriangleClass.DEGENERATE
    diff = sides[2] ** 2 - sides[0] ** 2 - sides[1] ** 2
    if abs(diff) <= tol:
        return TriangleClass.RIGHT
    return TriangleClass.OBTUSE if diff > 0 else TriangleClass.ACUTE


def obtuse_indicator(sides):
    """1.0 where the largest squared side is at least the sum of the others.

    Right and degenerate triangles count as obtuse here; both have
    probability zero.
    """
    sq = np.sort(np.asarray(sides) ** 2, axis=-1)
    return (sq[..., 2] >= sq[..., 0] + sq[..., 1]).astype(float)


def triangle_quantities(t):
    """Area, inradius, exradii, circumcurvature and class of a triangle.

    ``t`` may be a :class:`TriangleShape` or a sphere point. Exradii and
    circumcurvature are ``None`` for degenerate triangles. Exradii are
    ordered ``(r_a, r_b, r_c)``, opposite to sides ``a, b, c``.
    """
    if isinstance(t, TriangleShape):
        sa, sb, sc = t.split_semiperimeters
    else:
        # squares of the coordinates avoid cancellation in -a + b + c
        sa, sb, sc = (_point(t) ** 2).tolist()
        t = triangle_from_sphere(t)
    a, b, c = t.sides
    if min(a, b, c) < -SPHERE_TOL or abs(a + b + c - 2) > 1e-9:
        raise DomainError(f"sides {t.sides} are not a perimeter-2 triangle")
    cls = classify_sides(a, b, c)
    # Heron with s = 1
    area = math.sqrt(max(sa * sb * sc, 0.0))
    if cls is TriangleClass.DEGENERATE:
        return TriangleQuantities(area, area, None, None, cls)
    return TriangleQuantities(
        area=area,
        inradius=area,
        exradii=(area / sa, area / sb, area / sc),
        circumcurvature=4 * area / (a * b * c),
        classification=cls,
    )


def areas_from_spheres(P):
    P = np.asarray(P)
    return np.abs(P[:, 0] * P[:, 1] * P[:, 2])


def circumcurvatures_from_spheres(P):
    sides = sides_from_spheres(P)
    return 4 * areas_from_spheres(P) / np.prod(sides, axis=1)


def canonical_triangle(p):
    """Vertices ``A, B, C`` of the canonical triangle of a sphere point.

    Edge c is centred on the origin and points along +x; returns a
    ``(3, 2)`` array.

    Raises
    ------
    DegenerateEdgeError
        If ``|1 - z^2| <= 1e-9``.
    """
    x, y, z = _point(p)
    return _canonical_vertices(x, y, z)


def _canonical_vertices(x, y, z):
    c = 1 - z * z
    if abs(c) <= EDGE_TOL:
        raise DegenerateEdgeError(f"edge c = 1 - z^2 = {c:.3g} vanishes")
    cx = (-x ** 4 + 2 * x * x - 2 * y * y + y ** 4) / (2 * c)
    cy = -2 * x * y * z / c
    return np.array([[-c / 2, 0.0], [c / 2, 0.0], [cx, cy]])


def canonical_frame(p):
    """The orthonormal basis of ``p``'s normal plane used by the canonical triangle.

    Returns ``(u, v)`` with ``p, u, v`` positively oriented.
    """
    x, y, z = _point(p)
    c = 1 - z * z
    if abs(c) <= EDGE_TOL:
        raise DegenerateEdgeError(f"edge c = 1 - z^2 = {c:.3g} vanishes")
    r = math.sqrt(c)
    return (np.array([x * z, y * z, -(x * x + y * y)]) / r,
            np.array([-y, x, 0.0]) / r)


def obtuse_probability_exact():
    """Exact probability that a random triangle is obtuse, 3/2 - 3 ln 2 / pi."""
    return 1.5 - 3 * math.log(2) / math.pi


def acute_probability_exact():
    return 1.0 - obtuse_probability_exact()


def obtuse_area_antiderivative(y):
    """``arctan(y^2) - ln(1 + y^2) / 2``; 24 times its value at 1 is the obtuse area."""
    return math.atan(y * y) - 0.5 * math.log1p(y * y)


def right_boundary_curve(y, signs=(1, 1, 1)):
    """Point of the right-triangle curve ``a^2 + b^2 = c^2`` at height ``y``.

    ``signs`` picks the octant. For ``0 < y < 1`` the resulting triangle is
    right-angled at C; the endpoints are degenerate.
    """
    if not 0 <= y <= 1:
        raise DomainError(f"y must lie in [0, 1], got {y}")
    sx, sy, sz = signs
    w = math.sqrt((1 - y * y) / (1 + y * y))
    return np.array([sx * w, sy * y, sz * y * w])


def rotate_about_z(p, theta):
    x, y, z = _point(p)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([c * x - s * y, s * x + c * y, z])


def vertex_C_of_orbit(z, theta):
    """Vertex C of the canonical triangle of ``(sqrt(1-z^2) cos t, sqrt(1-z^2) sin t, z)``.

    It runs twice around the ellipse ``((1+z^2)/2 cos 2t, -z sin 2t)``.
    """
    if abs(z) >= 1:
        raise DegenerateEdgeError("|z| = 1 leaves no edge c")
    return np.array([(1 + z * z) / 2 * math.cos(2 * theta), -z * math.sin(2 * theta)])


def rotation_matrix(axis, angle):
    """Rodrigues rotation about a unit ``axis``."""
    k = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(k)
    if abs(norm - 1) > 1e-9:
        raise DomainError("rotation axis must be a unit vector")
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * (K @ K)


@dataclass(frozen=True)
class OrbitStep:
    theta: float
    point: tuple
    vertices: np.ndarray | None

    @property
    def degenerate(self):
        return self.vertices is None


def rotation_orbit_trace(p, axis, steps):
    """Canonical triangles along the rotation orbit of ``p`` about ``axis``.

    Samples ``steps`` equally spaced angles in ``[0, 2 pi)``. Steps where edge c
    vanishes are kept as records with ``vertices=None``.
    """
    p = _point(p)
    if steps < 1:
        raise DomainError("steps must be positive")
    out = []
    for k in range(steps):
        theta = 2 * math.pi * k / steps
        q = rotation_matrix(axis, theta) @ p
        try:
            verts = _canonical_vertices(*q)
        except DegenerateEdgeError:
            verts = None
        out.append(OrbitStep(theta, tuple(float(t) for t in q), verts))
    return out


def dirichlet_density(s_a, s_b):
    """Density ``(2 pi)^-1 (s_a s_b s_c)^(-1/2)`` of the split semiperimeters."""
    s_c = 1 - s_a - s_b
    if s_a <= 0 or s_b <= 0 or s_c <= 0:
        raise DomainError(f"({s_a}, {s_b}) is not inside the open simplex")
    return 1 / (2 * math.pi * math.sqrt(s_a * s_b * s_c))
