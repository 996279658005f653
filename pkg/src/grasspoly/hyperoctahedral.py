"""The hyperoctahedral group B_n of signed permutations and its actions.

An element ``beta`` is stored one-line: ``images[i-1] = beta(i)`` for
``i = 1..n``, with ``beta(-i) = -beta(i)``. It acts on frames by the signed
permutation matrix ``Q`` with ``(Q A)_i = sgn beta(i) * A_|beta(i)|``, hence

    Delta(beta P)_ij = sgn beta(i) sgn beta(j) Delta(P)_|beta(i)| |beta(j)|.

Composition is ``(beta * delta)(i) = beta(delta(i))``. With this convention
the action on frames is a right action: acting by ``beta`` and then by
``delta`` equals acting by ``beta * delta``.
"""

import itertools
import math
import re
from collections import deque
from dataclasses import dataclass

import numpy as np

from ._validation import check_n
from .exceptions import CapacityError, DomainError, InvalidFrameError
from .grassmann import (
    Frame,
    PluckerMatrix,
    SignSignature,
    upper_indices,
    upper_indices_with_diagonal,
)

MAX_EXHAUSTIVE_N = 8
MAX_ORBIT_N = 6


@dataclass(frozen=True)
class SignedPermutation:
    images: tuple

    def __post_init__(self):
        images = tuple(int(b) for b in self.images)
        if sorted(abs(b) for b in images) != list(range(1, len(images) + 1)):
            raise DomainError(f"{images} is not a signed permutation")
        object.__setattr__(self, "images", images)

    @classmethod
    def from_arrays(cls, perm, signs):
        """From a 0-based permutation and a sign vector."""
        return cls(tuple(int(s) * (int(p) + 1) for p, s in zip(perm, signs)))

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self):
        return len(self.images)

    @property
    def perm(self):
        """0-based ``|beta(i)| - 1``."""
        return np.array([abs(b) - 1 for b in self.images])

    @property
    def signs(self):
        return np.array([1 if b > 0 else -1 for b in self.images])

    def __call__(self, i):
        if i == 0 or abs(i) > self.n:
            raise DomainError(f"{i} is not in +-{{1..{self.n}}}")
        b = self.images[abs(i) - 1]
        return b if i > 0 else -b

    def __mul__(self, other):
        if not isinstance(other, SignedPermutation):
            return NotImplemented
        if other.n != self.n:
            raise DomainError("cannot compose signed permutations of different size")
        return SignedPermutation(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self):
        inv = [0] * self.n
        for i, b in enumerate(self.images, start=1):
            inv[abs(b) - 1] = i if b > 0 else -i
        return SignedPermutation(tuple(inv))

    def __pow__(self, k):
        out = SignedPermutation.identity(self.n)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out * base
        return out

    def order(self):
        k, g, e = 1, self, SignedPermutation.identity(self.n)
        while g != e:
            g, k = g * self, k + 1
        return k

    def matrix(self):
        Q = np.zeros((self.n, self.n))
        Q[np.arange(self.n), self.perm] = self.signs
        return Q

    @property
    def is_sign_flip(self):
        return all(abs(b) == i for i, b in enumerate(self.images, start=1))

    def underlying_permutation(self):
        """The unsigned permutation, 0-based, as a tuple."""
        return tuple(int(p) for p in self.perm)

    def cycles(self):
        """Cycle notation on ``{-n..-1, 1..n}``, e.g. ``'(1,2,-1,-2)'``."""
        seen, parts = set(), []
        for start in list(range(1, self.n + 1)) + list(range(-1, -self.n - 1, -1)):
            if start in seen or self(start) == start:
                continue
            cyc, i = [], start
            while i not in seen:
                seen.add(i)
                cyc.append(i)
                i = self(i)
            parts.append("(" + ",".join(str(c) for c in cyc) + ")")
        return "".join(parts) or "()"

    @classmethod
    def from_cycles(cls, text, n):
        """Parse cycle notation. Paired negative cycles may be omitted."""
        mapping = {}
        for body in re.findall(r"\(([^()]*)\)", text.replace(" ", "")):
            if not body:
                continue
            pts = [int(t) for t in body.split(",")]
            for a, b in zip(pts, pts[1:] + pts[:1]):
                for src, dst in ((a, b), (-a, -b)):
                    if mapping.get(src, dst) != dst:
                        raise DomainError(f"inconsistent cycle notation {text!r}")
                    mapping[src] = dst
        if any(abs(k) > n or k == 0 for k in mapping):
            raise DomainError(f"cycle notation {text!r} mentions points outside +-1..{n}")
        return cls(tuple(mapping.get(i, i) for i in range(1, n + 1)))

    def __str__(self):
        return self.cycles()


# -- named elements ---------------------------------------------------------

def negation(n):
    """``eta``: flips every sign; acts trivially on planes."""
    return SignedPermutation(tuple(-i for i in range(1, n + 1)))


def reversal(n):
    """``gamma``: ``i -> n + 1 - i``."""
    return SignedPermutation(tuple(range(n, 0, -1)))


def cyclic_shift(n):
    """Rotation of the positive chamber: ``i -> i+1`` for ``i < n`` and ``n -> -1``.

    Its square-root-of-edge lift takes the opposite sign on the wrapped
    row, which is what keeps a semicircular lift semicircular. As a signed
    permutation it has order ``2n`` with ``n``-th power ``eta``, so it has
    order ``n`` on planes.
    """
    return SignedPermutation(tuple(range(2, n + 1)) + (-1,))


def plain_cycle(n):
    """The unsigned cycle ``(1, 2, ..., n)``; it does not preserve the positive chamber."""
    return SignedPermutation(tuple(range(2, n + 1)) + (1,))


def transposition(n, i, j):
    images = list(range(1, n + 1))
    images[i - 1], images[j - 1] = j, i
    return SignedPermutation(tuple(images))


def elements(n):
    """Iterate over all ``2^n n!`` elements of B_n."""
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            yield SignedPermutation.from_arrays(perm, signs)


def group_order(n):
    return 2 ** n * math.factorial(n)


def generate_subgroup(generators):
    gens = list(generators)
    e = SignedPermutation.identity(gens[0].n)
    seen, queue = {e}, deque([e])
    while queue:
        g = queue.popleft()
        for h in gens:
            k = g * h
            if k not in seen:
                seen.add(k)
                queue.append(k)
    return seen


# -- actions ----------------------------------------------------------------

def _check_size(beta, n):
    if beta.n != n:
        raise DomainError(f"signed permutation has n={beta.n}, object has n={n}")


def act_on_frame(beta, frame):
    """Row ``i`` of the result is ``sgn beta(i)`` times row ``|beta(i)|``."""
    A = frame.matrix if isinstance(frame, Frame) else np.asarray(frame, dtype=float)
    if A.ndim != 2 or A.shape[1] != 2:
        raise InvalidFrameError("expected an (n, 2) frame")
    _check_size(beta, A.shape[0])
    out = beta.signs[:, None] * A[beta.perm]
    return Frame.from_matrix(out, validate=False) if isinstance(frame, Frame) else out


def act_on_frames(beta, frames):
    """Batched :func:`act_on_frame` on an ``(m, n, 2)`` array."""
    F = np.asarray(frames, dtype=float)
    _check_size(beta, F.shape[1])
    return beta.signs[None, :, None] * F[:, beta.perm]


def act_on_matrix(beta, M):
    """``Q M Q^T``: the action on Plücker, projection and sign matrices."""
    M = np.asarray(M)
    _check_size(beta, M.shape[-1])
    s, p = beta.signs, beta.perm
    return (s[:, None] * s[None, :]) * M[np.ix_(p, p)]


def act_on_plucker(beta, plucker):
    return PluckerMatrix.from_full(act_on_matrix(beta, plucker.full()))


def act_on_signature(beta, signature):
    _check_size(beta, signature.n)
    P = act_on_matrix(beta, signature.plucker_matrix())
    Q = act_on_matrix(beta, signature.projection_matrix())
    return SignSignature.from_matrices(P, Q)


# -- signatures of interest -------------------------------------------------

def positive_chamber_signature(n):
    """``S^0``: all upper Plücker signs +1. Projection signs are left at 0 (unused)."""
    return SignSignature(n, (1,) * (n * (n - 1) // 2), (0,) * (n * (n + 1) // 2))


def base_cell_signature():
    """The base sign cell of G_2(R^4).

    Positive Plücker signs; the projection matrix is positive except for the
    (1, 4) and (4, 1) entries.
    """
    Q = np.ones((4, 4), dtype=int)
    Q[0, 3] = Q[3, 0] = -1
    return SignSignature.from_matrices(np.triu(np.ones((4, 4), dtype=int), 1)
                                       - np.tril(np.ones((4, 4), dtype=int), -1), Q)


MODES = ("chamber", "cell")


def _mode(mode):
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def _key(signature, mode):
    s = signature.canonicalize()
    return s.plucker if mode == "chamber" else (s.plucker, s.projection)


@dataclass(frozen=True)
class GroupOrbitReport:
    n: int
    mode: str
    orbit_size: int
    stabilizer_order: int
    stabilizer_elements: tuple

    @property
    def group_order(self):
        return group_order(self.n)

    def to_dict(self):
        return {"n": self.n, "mode": self.mode, "orbit_size": self.orbit_size,
                "stabilizer_order": self.stabilizer_order,
                "group_order": self.group_order,
                "stabilizer": [g.cycles() for g in self.stabilizer_elements]}


def stabilizer_of_signature(target, mode="cell"):
    """All elements of B_n fixing ``target`` up to the global Plücker sign.

    ``mode='chamber'`` compares Plücker signs only, ``mode='cell'`` also
    the projection signs. The scan is exhaustive over the ``2^n n!``
    elements (vectorized over sign vectors).

    Raises
    ------
    CapacityError
        If ``n > 8``.
    """
    mode = _mode(mode)
    n = target.n
    if n > MAX_EXHAUSTIVE_N:
        raise CapacityError(f"exhaustive scan of B_{n} ({group_order(n)} elements) refused; n <= 8")
    target = target.canonicalize()
    S = target.plucker_matrix()
    T = target.projection_matrix()
    iu = upper_indices(n)
    idu = upper_indices_with_diagonal(n)
    signs = np.array(list(itertools.product((1, -1), repeat=n)), dtype=np.int8)
    outer = signs[:, :, None] * signs[:, None, :]
    outer_u = outer[:, iu[0], iu[1]]
    outer_d = outer[:, idu[0], idu[1]]
    s_u = S[iu].astype(np.int8)
    t_d = T[idu].astype(np.int8)
    found = []
    for perm in itertools.permutations(range(n)):
        p = np.array(perm)
        Sp = S[np.ix_(p, p)][iu].astype(np.int8)
        cand = outer_u * Sp
        ok = (cand == s_u).all(axis=1) | (cand == -s_u).all(axis=1)
        if mode == "cell" and ok.any():
            Tp = T[np.ix_(p, p)][idu].astype(np.int8)
            ok &= (outer_d * Tp == t_d).all(axis=1)
        for k in np.flatnonzero(ok):
            found.append(SignedPermutation.from_arrays(perm, signs[k]))
    order = len(found)
    return GroupOrbitReport(n, mode, group_order(n) // order, order, tuple(found))


def _generators(n):
    return [transposition(n, i, i + 1) for i in range(1, n)] + \
        [SignedPermutation((-1,) + tuple(range(2, n + 1)))]


def orbit_of_signature(seed, mode="cell"):
    """Orbit of a signature under B_n, as a set of canonical signatures.

    Built by breadth-first closure under the Coxeter generators of B_n.
    In ``'chamber'`` mode projection signs are ignored and each orbit
    element carries zeros there.

    Raises
    ------
    CapacityError
        If ``n > 6``.
    """
    mode = _mode(mode)
    n = seed.n
    if n > MAX_ORBIT_N:
        raise CapacityError(f"orbit enumeration limited to n <= {MAX_ORBIT_N}")
    start = seed.canonicalize()
    if mode == "chamber":
        start = SignSignature(n, start.plucker, (0,) * len(start.projection))
    seen = {start}
    queue = deque([start])
    gens = _generators(n)
    while queue:
        s = queue.popleft()
        for g in gens:
            t = act_on_signature(g, s)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def transporter(source, target, mode="cell"):
    """Some ``beta`` with ``beta . source = target`` (canonical comparison), or ``None``."""
    mode = _mode(mode)
    want = _key(target, mode)
    for g in elements(source.n):
        if _key(act_on_signature(g, source), mode) == want:
            return g
    return None


def chamber_count_formula(n):
    n = check_n(n)
    return 2 ** (n - 2) * math.factorial(n - 1)


@dataclass(frozen=True)
class ChamberCount:
    n: int
    formula: int
    orbit_stabilizer: int | None
    orbit_size: int | None

    @property
    def consistent(self):
        return all(v is None or v == self.formula
                   for v in (self.orbit_stabilizer, self.orbit_size))


def count_chambers(n, exhaustive=True):
    """Number of sign chambers in G_2(R^n).

    With ``exhaustive=True`` (``n <= 8``) the closed form is cross-checked
    against ``|B_n| / |stabilizer of S^0|`` and, for ``n <= 6``, against the
    size of the orbit of ``S^0``.
    """
    formula = chamber_count_formula(n)
    if not exhaustive:
        return ChamberCount(n, formula, None, None)
    report = stabilizer_of_signature(positive_chamber_signature(n), mode="chamber")
    orbit = len(orbit_of_signature(positive_chamber_signature(n), "chamber")) \
        if n <= MAX_ORBIT_N else None
    return ChamberCount(n, formula, report.orbit_size, orbit)


def count_cells_n4():
    """Number of sign cells of G_2(R^4): ``384 / |stabilizer of the base cell|``."""
    return stabilizer_of_signature(base_cell_signature(), mode="cell").orbit_size
