"""Seeded sampling of the symmetric measure.

Points on the sphere and frames on the Stiefel manifold are built from
standard Gaussians, whose rotation invariance makes the results uniform.
Each :class:`SampleStream` wraps a PCG64 generator keyed by
``(seed, stream_id)`` through :class:`numpy.random.SeedSequence`, so
parallel workers get independent substreams.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_n
from .exceptions import DomainError, SamplingExhaustedError
from .grassmann import Frame, row_keys, sign_arrays, signature_row

DEFAULT_SEED = 20170104
DEGENERATE_TOL = 1e-12


@dataclass
class SampleStream:
    """Reproducible random source.

    ``counter`` counts the sphere points or frames drawn so far.
    """

    seed: int = DEFAULT_SEED
    stream_id: int = 0
    counter: int = 0
    worker: tuple = ()
    _rng: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.seed < 0 or self.stream_id < 0:
            raise DomainError("seed and stream_id must be non-negative")
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,) + tuple(self.worker))
        self._rng = np.random.Generator(np.random.PCG64(ss))

    @property
    def rng(self):
        return self._rng

    def spawn(self, k):
        """``k`` independent child streams, e.g. one per worker."""
        return [SampleStream(self.seed, self.stream_id, worker=self.worker + (w,))
                for w in range(k)]

    def provenance(self):
        out = {"seed": self.seed, "stream": self.stream_id, "counter": self.counter}
        if self.worker:
            out["worker"] = list(self.worker)
        return out


def sample_spheres(stream, size):
    """Array of ``size`` uniform points on the unit sphere, shape ``(size, 3)``."""
    g = stream.rng.standard_normal((size, 3))
    r = np.linalg.norm(g, axis=1)
    bad = r < DEGENERATE_TOL
    while bad.any():
        g[bad] = stream.rng.standard_normal((int(bad.sum()), 3))
        r = np.linalg.norm(g, axis=1)
        bad = r < DEGENERATE_TOL
    stream.counter += size
    return g / r[:, None]


def sample_sphere(stream):
    """One uniform point on the unit sphere as a length-3 array."""
    return sample_spheres(stream, 1)[0]


def sample_frames(n, stream, size):
    """Uniform random frames, shape ``(size, n, 2)``.

    Two Gaussian vectors per frame; the first is normalized and the second
    is Gram-Schmidt projected against it and normalized. Near-parallel draws
    are redrawn.
    """
    n = check_n(n)
    g = stream.rng.standard_normal((size, n, 2))
    out = np.empty_like(g)
    todo = np.arange(size)
    while len(todo):
        a = g[todo, :, 0]
        b = g[todo, :, 1]
        na = np.linalg.norm(a, axis=1)
        u = a / np.where(na > 0, na, 1.0)[:, None]
        b = b - np.einsum("mi,mi->m", u, b)[:, None] * u
        nb = np.linalg.norm(b, axis=1)
        ok = (na > DEGENERATE_TOL) & (nb > DEGENERATE_TOL * np.maximum(1.0, na))
        good = todo[ok]
        out[good, :, 0] = u[ok]
        out[good, :, 1] = b[ok] / nb[ok, None]
        todo = todo[~ok]
        if len(todo):
            g[todo] = stream.rng.standard_normal((len(todo), n, 2))
    stream.counter += size
    return out


def sample_frame(n, stream):
    """One uniform random :class:`~grasspoly.grassmann.Frame`."""
    return Frame.from_matrix(sample_frames(n, stream, 1)[0], validate=False)


def sample_in_signature(n, target, stream, max_tries=1_000_000, batch=None):
    """Rejection-sample frames from the sign cell ``target``.

    Returns a single :class:`Frame` distributed as the symmetric measure
    conditioned on the cell.

    Raises
    ------
    SamplingExhaustedError
        When ``max_tries`` draws produce no hit.
    """
    frames = sample_many_in_signature(n, target, stream, 1, max_tries=max_tries, batch=batch)
    return Frame.from_matrix(frames[0], validate=False)


def acceptance_rate(n, target, stream, tries):
    """Fraction of ``tries`` uniform frames that land in the cell ``target``."""
    key = row_keys(signature_row(target.canonicalize())[None])[0]
    F = sample_frames(n, stream, tries)
    return float(np.mean(row_keys(sign_arrays(F, 0.0)) == key))


def sample_many_in_signature(n, target, stream, count, max_tries=None, batch=None):
    """``count`` frames from the sign cell ``target``, shape ``(count, n, 2)``."""
    n = check_n(n)
    if target.n != n:
        raise DomainError(f"target signature has n={target.n}, expected {n}")
    if not target.is_open:
        raise DomainError("target must be an open cell (no zero off-diagonal signs)")
    if max_tries is None:
        max_tries = 1_000 * count * 2 ** n
    key = row_keys(signature_row(target.canonicalize())[None])[0]
    batch = batch or max(1024, min(200_000, 4 * count * 2 ** n))
    found, tries = [], 0
    have = 0
    while have < count and tries < max_tries:
        m = min(batch, max_tries - tries)
        F = sample_frames(n, stream, m)
        tries += m
        hit = row_keys(sign_arrays(F, 0.0)) == key
        if hit.any():
            found.append(F[hit])
            have += int(hit.sum())
    if have < count:
        rate = have / tries if tries else 0.0
        raise SamplingExhaustedError(
            f"found {have} of {count} frames in {tries} tries (acceptance {rate:.3g})",
            acceptance_rate=rate, tries=tries)
    return np.concatenate(found)[:count]
