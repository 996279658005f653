"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np

from .exceptions import DomainError, InvalidFrameError

ORTHONORMAL_TOL = 1e-9


def check_n(n, minimum=3):
    if not isinstance(n, numbers.Integral) or isinstance(n, bool):
        raise DomainError(f"n must be an integer, got {n!r}")
    if n < minimum:
        raise DomainError(f"n must be >= {minimum}, got {n}")
    return int(n)


def orthonormality_residual(frames):
    """Largest deviation of ``A^T A`` from the identity, per frame.

    ``frames`` has shape ``(m, n, 2)``; returns shape ``(m,)``.
    """
    gram = np.einsum("mik,mil->mkl", frames, frames)
    return np.abs(gram - np.eye(2)).reshape(len(frames), 4).max(axis=1)


def check_frames(X, tol=ORTHONORMAL_TOL, validate=True):
    """Coerce ``X`` to a float array of frames with shape ``(m, n, 2)``.

    Accepts a single ``(n, 2)`` frame, a stack ``(m, n, 2)``, or the
    flattened sklearn layout ``(m, 2n)`` holding ``u`` then ``v``.
    """
    from .grassmann import Frame

    if isinstance(X, Frame):
        X = X.matrix[None]
    elif isinstance(X, (list, tuple)) and X and isinstance(X[0], Frame):
        X = np.stack([f.matrix for f in X])
    A = np.asarray(X, dtype=float)
    if A.ndim == 2 and A.shape[1] == 2 and A.shape[0] >= 3:
        A = A[None]
    elif A.ndim == 2:
        if A.shape[1] % 2 or A.shape[1] < 6:
            raise InvalidFrameError(
                f"flattened frames need an even width >= 6, got {A.shape[1]}")
        n = A.shape[1] // 2
        A = np.stack([A[:, :n], A[:, n:]], axis=2)
    if A.ndim != 3 or A.shape[2] != 2:
        raise InvalidFrameError(f"cannot interpret array of shape {np.shape(X)} as frames")
    if A.shape[1] < 3:
        raise InvalidFrameError(f"frames need n >= 3 rows, got {A.shape[1]}")
    if not np.all(np.isfinite(A)):
        raise InvalidFrameError("frames contain non-finite values")
    if validate and len(A):
        worst = orthonormality_residual(A).max()
        if worst > tol:
            raise InvalidFrameError(
                f"frame columns are not orthonormal (residual {worst:.3g} > {tol:g})")
    return A


def check_edges(X):
    """Coerce edge vectors to shape ``(m, n, 2)``."""
    E = np.asarray(X, dtype=float)
    if E.ndim == 2 and E.shape[1] == 2:
        E = E[None]
    if E.ndim != 3 or E.shape[2] != 2:
        raise DomainError(f"cannot interpret array of shape {np.shape(X)} as polygon edges")
    return E
