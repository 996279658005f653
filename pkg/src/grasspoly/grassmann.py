"""Frames, Plücker matrices and projection matrices of 2-planes in R^n.

A *frame* is an ``n x 2`` matrix ``A = (u v)`` with orthonormal columns. The
plane it spans is represented up to sign by the skew matrix of its 2x2
minors ``Delta_ij = u_i v_j - u_j v_i`` and exactly by the orthogonal
projector ``A A^T``. Indices are 0-based in Python and 1-based in JSON.

Every operation has a scalar form acting on the immutable types below and
a batched form acting on ``(m, n, 2)`` arrays, which the samplers and Monte
Carlo code use.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._validation import ORTHONORMAL_TOL, check_frames, check_n
from .exceptions import DomainError, InvalidFrameError, NotAPlaneError

IDENTITY_TOL = 1e-10
RECOVERY_TOL = 1e-9
SINGULAR_VALUE_TOL = 1e-6
DEFAULT_SIGN_EPS = 1e-9


@lru_cache(maxsize=None)
def upper_indices(n):
    """Row and column indices of the strict upper triangle, row-major."""
    i, j = np.triu_indices(n, 1)
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


@lru_cache(maxsize=None)
def upper_indices_with_diagonal(n):
    i, j = np.triu_indices(n, 0)
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Frame:
    """Orthonormal pair ``(u, v)`` in R^n, a lift of a planar n-gon."""

    u: np.ndarray
    v: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        u, v = _readonly(self.u), _readonly(self.v)
        if u.ndim != 1 or u.shape != v.shape:
            raise InvalidFrameError("u and v must be 1-d vectors of equal length")
        if len(u) < 3:
            raise InvalidFrameError(f"frames need n >= 3, got {len(u)}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        if self.validate:
            check_frames(self.matrix[None], tol=ORTHONORMAL_TOL)

    @classmethod
    def from_matrix(cls, A, validate=True):
        A = np.asarray(A, dtype=float)
        return cls(A[:, 0], A[:, 1], validate=validate)

    @property
    def n(self):
        return len(self.u)

    @property
    def matrix(self):
        return np.column_stack([self.u, self.v])

    def rotated(self, phi):
        """Rotate the basis inside its own plane by ``phi``."""
        c, s = np.cos(phi), np.sin(phi)
        return Frame(c * self.u + s * self.v, -s * self.u + c * self.v)

    def swapped(self):
        """The basis ``(v, u)``: same plane, opposite orientation."""
        return Frame(self.v, self.u)

    def to_dict(self):
        return {"n": self.n, "u": self.u.tolist(), "v": self.v.tolist()}

    @classmethod
    def from_dict(cls, d):
        frame = cls(d["u"], d["v"])
        if frame.n != d["n"]:
            raise InvalidFrameError(f"declared n={d['n']} but vectors have length {frame.n}")
        return frame

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return np.array_equal(self.u, other.u) and np.array_equal(self.v, other.v)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class PluckerMatrix:
    """Skew matrix of 2x2 minors, stored as its strict upper triangle.

    ``upper`` follows the row-major order of ``upper_indices(n)``:
    ``(0,1), (0,2), ..., (0,n-1), (1,2), ...``.
    """

    n: int
    upper: np.ndarray

    def __post_init__(self):
        check_n(self.n)
        upper = _readonly(self.upper)
        if upper.shape != (self.n * (self.n - 1) // 2,):
            raise NotAPlaneError(
                f"expected {self.n * (self.n - 1) // 2} upper entries, got {upper.shape}")
        object.__setattr__(self, "upper", upper)

    @classmethod
    def from_full(cls, M):
        M = np.asarray(M, dtype=float)
        n = M.shape[0]
        return cls(n, M[upper_indices(n)])

    def full(self):
        M = np.zeros((self.n, self.n))
        i, j = upper_indices(self.n)
        M[i, j] = self.upper
        M[j, i] = -self.upper
        return M

    def __getitem__(self, ij):
        i, j = ij
        if i == j:
            return 0.0
        if i > j:
            return -self[j, i]
        n = self.n
        return float(self.upper[i * n - i * (i + 1) // 2 + (j - i - 1)])

    def __neg__(self):
        return PluckerMatrix(self.n, -self.upper)

    def scaled(self, factor):
        return PluckerMatrix(self.n, factor * self.upper)

    def relation_residuals(self):
        return plucker_relation_residuals(self.upper[None], self.n)[0]

    def to_dict(self):
        i, j = upper_indices(self.n)
        return {"n": self.n,
                "upper": [[int(a) + 1, int(b) + 1, float(x)]
                          for a, b, x in zip(i, j, self.upper)]}

    @classmethod
    def from_dict(cls, d):
        n = d["n"]
        M = np.zeros((n, n))
        for i, j, x in d["upper"]:
            if not 1 <= i < j <= n:
                raise NotAPlaneError(f"bad upper-triangle index ({i}, {j}) for n={n}")
            M[i - 1, j - 1] = x
        return cls(n, M[upper_indices(n)])


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    """Orthogonal projector ``A A^T`` onto a plane."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _readonly(self.matrix))

    @property
    def n(self):
        return self.matrix.shape[0]

    def distance(self, other):
        """Largest entrywise difference to another projector."""
        other = other.matrix if isinstance(other, ProjectionMatrix) else np.asarray(other)
        return float(np.abs(self.matrix - other).max())


@dataclass(frozen=True)
class SignSignature:
    """Sign pattern of the Plücker and projection matrices of a plane.

    ``plucker`` holds the strict upper triangle of ``sgn Delta`` and
    ``projection`` the upper triangle (diagonal included) of ``sgn A A^T``,
    both row-major. A signature and its Plücker negation name the same set
    of planes; ``canonical=True`` marks the representative whose first
    nonzero Plücker sign is +1.
    """

    n: int
    plucker: tuple
    projection: tuple
    canonical: bool = True

    def canonicalize(self):
        flip = next((s for s in self.plucker if s != 0), 1)
        plucker = tuple(int(flip * s) for s in self.plucker)
        return SignSignature(self.n, plucker, self.projection, True)

    def negated(self):
        return SignSignature(self.n, tuple(-s for s in self.plucker), self.projection, False)

    @property
    def is_open(self):
        """True when no off-diagonal sign is zero."""
        n = self.n
        diag_positions = {i * n - i * (i - 1) // 2 for i in range(n)}
        off = [s for k, s in enumerate(self.projection) if k not in diag_positions]
        return 0 not in self.plucker and 0 not in off

    def plucker_matrix(self):
        S = np.zeros((self.n, self.n), dtype=int)
        i, j = upper_indices(self.n)
        S[i, j] = self.plucker
        S[j, i] = -np.asarray(self.plucker)
        return S

    def projection_matrix(self):
        S = np.zeros((self.n, self.n), dtype=int)
        i, j = upper_indices_with_diagonal(self.n)
        S[i, j] = self.projection
        S[j, i] = self.projection
        return S

    @classmethod
    def from_matrices(cls, plucker_signs, projection_signs, canonicalize=True):
        P = np.asarray(plucker_signs)
        Q = np.asarray(projection_signs)
        n = P.shape[0]
        sig = cls(n,
                  tuple(int(s) for s in P[upper_indices(n)]),
                  tuple(int(s) for s in Q[upper_indices_with_diagonal(n)]),
                  canonical=False)
        return sig.canonicalize() if canonicalize else sig

    def to_dict(self):
        return {"n": self.n,
                "plucker_signs": self.plucker_matrix().tolist(),
                "projection_signs": self.projection_matrix().tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls.from_matrices(d["plucker_signs"], d["projection_signs"])


def _frame_array(frame):
    if isinstance(frame, Frame):
        return frame.matrix[None]
    return check_frames(frame)


# -- batched kernels --------------------------------------------------------

def plucker_coordinates(frames):
    """Upper-triangular Plücker coordinates of a stack of frames.

    Parameters
    ----------
    frames : array of shape (m, n, 2)

    Returns
    -------
    array of shape (m, n(n-1)/2)
    """
    frames = np.asarray(frames, dtype=float)
    i, j = upper_indices(frames.shape[1])
    u, v = frames[..., 0], frames[..., 1]
    return u[:, i] * v[:, j] - u[:, j] * v[:, i]


def projection_entries(frames):
    """Upper triangle (with diagonal) of ``A A^T`` for a stack of frames."""
    frames = np.asarray(frames, dtype=float)
    i, j = upper_indices_with_diagonal(frames.shape[1])
    return np.einsum("mkc,mkc->mk", frames[:, i], frames[:, j])


def full_plucker(upper, n):
    """Expand ``(m, n(n-1)/2)`` upper triangles to ``(m, n, n)`` skew matrices."""
    upper = np.asarray(upper, dtype=float)
    M = np.zeros(upper.shape[:-1] + (n, n))
    i, j = upper_indices(n)
    M[..., i, j] = upper
    M[..., j, i] = -upper
    return M


def plucker_relation_residuals(upper, n):
    """Residuals ``D_ij D_kl - D_ik D_jl + D_il D_jk`` for all ``i<j<k<l``."""
    M = full_plucker(upper, n)
    quads = [(i, j, k, l) for i in range(n) for j in range(i + 1, n)
             for k in range(j + 1, n) for l in range(k + 1, n)]
    if not quads:
        return np.zeros((M.shape[0], 0))
    i, j, k, l = np.array(quads).T
    return (M[:, i, j] * M[:, k, l] - M[:, i, k] * M[:, j, l]
            + M[:, i, l] * M[:, j, k])


def sign_arrays(frames, epsilon=0.0):
    """Canonical sign patterns of a stack of frames as ``int8`` rows.

    Each row is the Plücker signs followed by the projection signs, with
    the Plücker part negated where needed so that its first nonzero entry
    is +1.
    """
    P = plucker_coordinates(frames)
    Q = projection_entries(frames)
    sp = np.where(np.abs(P) <= epsilon, 0, np.sign(P)).astype(np.int8)
    sq = np.where(np.abs(Q) <= epsilon, 0, np.sign(Q)).astype(np.int8)
    nonzero = sp != 0
    first = np.where(nonzero.any(axis=1), nonzero.argmax(axis=1), 0)
    lead = sp[np.arange(len(sp)), first]
    sp = sp * np.where(lead < 0, -1, 1).astype(np.int8)[:, None]
    return np.concatenate([sp, sq], axis=1)


def signature_from_row(row, n):
    k = n * (n - 1) // 2
    return SignSignature(n, tuple(int(s) for s in row[:k]), tuple(int(s) for s in row[k:]))


def signature_row(signature):
    return np.array(signature.plucker + signature.projection, dtype=np.int8)


def signature_key(signature):
    """``bytes`` key of a signature; equals ``row_keys(rows).tolist()`` entries."""
    return signature_row(signature).tobytes()


def row_keys(rows):
    """Byte keys for the rows of a 2-d integer array.

    The result compares elementwise against :func:`signature_key`-style
    scalars; call ``.tolist()`` for hashable ``bytes``.
    """
    rows = np.ascontiguousarray(rows, dtype=np.int8)
    return rows.view(np.dtype((np.void, rows.shape[1]))).ravel()


# -- scalar operations ------------------------------------------------------

def plucker_from_frame(frame):
    """Plücker matrix ``Delta_ij = u_i v_j - u_j v_i`` of a frame."""
    A = _frame_array(frame)
    return PluckerMatrix(A.shape[1], plucker_coordinates(A)[0])


def projection_from_frame(frame):
    """Projection matrix ``A A^T`` of a frame."""
    A = _frame_array(frame)[0]
    return ProjectionMatrix(A @ A.T)


def projection_from_plucker(plucker):
    """``-Delta^2``, which equals ``A A^T`` for a frame-derived Plücker matrix."""
    D = plucker.full()
    return ProjectionMatrix(-(D @ D))


def recover_frame(plucker):
    """Orthonormal basis of the plane with the given Plücker matrix.

    Uses the two leading left singular vectors of ``Delta``. The columns are
    ordered so that the returned frame reproduces ``plucker`` itself rather
    than its negation.

    Raises
    ------
    NotAPlaneError
        If the singular values are not ``1, 1, 0, ..., 0`` within 1e-6.
    """
    D = plucker.full()
    U, s, _ = np.linalg.svd(D)
    expected = np.zeros_like(s)
    expected[:2] = 1.0
    dev = np.abs(s - expected).max()
    if dev > SINGULAR_VALUE_TOL:
        raise NotAPlaneError(
            f"singular values {np.round(s, 6).tolist()} deviate from (1, 1, 0, ...) by {dev:.3g}")
    A = U[:, :2]
    if np.dot(plucker_coordinates(A[None])[0], plucker.upper) < 0:
        A = A[:, ::-1]
    return Frame.from_matrix(A, validate=False)


def sign_signature(frame, epsilon=DEFAULT_SIGN_EPS):
    """Canonical sign signature of a frame.

    Entries with absolute value at most ``epsilon`` become 0.
    """
    if epsilon < 0:
        raise DomainError("epsilon must be non-negative")
    A = _frame_array(frame)
    return signature_from_row(sign_arrays(A, epsilon)[0], A.shape[1])
