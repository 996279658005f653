import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from grasspoly import Frame, SampleStream

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CI_SEED = 7


@pytest.fixture
def stream():
    return SampleStream(CI_SEED)


def _orthonormal(G):
    Q, R = np.linalg.qr(G)
    return Q * np.sign(np.diag(R))


@st.composite
def frames(draw, n=None, min_n=3, max_n=8):
    """Orthonormal frames built from well-conditioned Gaussian-like pairs."""
    n = n if n is not None else draw(st.integers(min_n, max_n))
    G = draw(arrays(np.float64, (n, 2), elements=st.floats(-1.0, 1.0)))
    G = G + np.eye(n, 2) * 2.0 * draw(st.sampled_from([-1.0, 1.0]))
    return Frame.from_matrix(_orthonormal(G))


@st.composite
def sphere_points(draw, margin=1e-3):
    v = draw(arrays(np.float64, 3, elements=st.floats(-1.0, 1.0)))
    norm = np.linalg.norm(v)
    if norm < 0.1:
        v = np.array([1.0, 0.5, -0.25])
        norm = np.linalg.norm(v)
    p = v / norm
    return p if min(abs(1 - p ** 2)) > margin else np.array([0.6, 0.48, 0.64])


angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)
