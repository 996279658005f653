"""scikit-learn compatible wrappers.

Frames are accepted as ``(m, n, 2)`` stacks or in the flat layout
``(m, 2n)`` with all ``u`` coordinates followed by all ``v`` coordinates,
so these estimators drop into pipelines and ``clone``/``get_params`` work
as usual.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_frames
from .exceptions import InvalidFrameError
from .grassmann import (
    plucker_coordinates,
    projection_entries,
    row_keys,
    sign_arrays,
    signature_key,
    upper_indices,
    upper_indices_with_diagonal,
)
from .polygons import CLASS_CODES, PolygonClass, classify_frames, edges_from_frames
from .quadcells import build_quad_cell_table, flag_mean, singular_values
from .sampling import DEFAULT_SEED, SampleStream


class _FrameTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        X = check_frames(X)
        self.n_edges_ = X.shape[1]
        self.n_features_in_ = 2 * self.n_edges_
        return self

    def _check(self, X):
        check_is_fitted(self, "n_edges_")
        X = check_frames(X)
        if X.shape[1] != self.n_edges_:
            raise InvalidFrameError(
                f"fitted on n={self.n_edges_} but got frames with n={X.shape[1]}")
        return X


class PluckerTransformer(_FrameTransformer):
    """Frames to their upper-triangular Plücker coordinates."""

    def transform(self, X):
        return plucker_coordinates(self._check(X))

    def get_feature_names_out(self, input_features=None):
        i, j = upper_indices(self.n_edges_)
        return np.array([f"delta_{a + 1}{b + 1}" for a, b in zip(i, j)], dtype=object)


class ProjectionTransformer(_FrameTransformer):
    """Frames to the upper triangle (with diagonal) of ``A A^T``."""

    def transform(self, X):
        return projection_entries(self._check(X))

    def get_feature_names_out(self, input_features=None):
        i, j = upper_indices_with_diagonal(self.n_edges_)
        return np.array([f"proj_{a + 1}{b + 1}" for a, b in zip(i, j)], dtype=object)


class PolygonTransformer(_FrameTransformer):
    """Frames to polygon edge vectors, flattened as ``(ex_1, ey_1, ex_2, ...)``."""

    def transform(self, X):
        E = edges_from_frames(self._check(X))
        return E.reshape(len(E), -1)

    def get_feature_names_out(self, input_features=None):
        return np.array([f"e{k + 1}_{c}" for k in range(self.n_edges_) for c in "xy"],
                        dtype=object)


class SignCellEncoder(_FrameTransformer):
    """Frames to canonical sign rows (Plücker signs, then projection signs).

    Parameters
    ----------
    epsilon : float
        Entries with ``|value| <= epsilon`` map to 0.
    """

    def __init__(self, epsilon=0.0):
        self.epsilon = epsilon

    def transform(self, X):
        return sign_arrays(self._check(X), self.epsilon)


class QuadrilateralClassifier(ClassifierMixin, BaseEstimator):
    """Predict the class of a quadrilateral from the sign cell of its frame.

    ``fit`` ignores its arguments and builds the 96-cell table from the flag
    mean of ``n_base_samples`` base-cell samples. ``predict`` is then a
    table lookup with no geometry at all. Frames on a cell wall are
    predicted ``'degenerate'``.
    """

    def __init__(self, n_base_samples=10_000, random_state=None):
        self.n_base_samples = n_base_samples
        self.random_state = random_state

    def fit(self, X=None, y=None):
        seed = DEFAULT_SEED if self.random_state is None else int(self.random_state)
        table = build_quad_cell_table(SampleStream(seed), self.n_base_samples)
        self.table_ = table
        self.classes_ = np.array([c.value for c in CLASS_CODES[:3]], dtype=object)
        self._lookup = {signature_key(e.signature): e.polygon_class.value
                        for e in table.entries}
        self.n_features_in_ = 8
        return self

    def predict(self, X):
        check_is_fitted(self, "table_")
        X = check_frames(X)
        if X.shape[1] != 4:
            raise InvalidFrameError("QuadrilateralClassifier needs n = 4 frames")
        keys = row_keys(sign_arrays(X, 0.0)).tolist()
        return np.array([self._lookup.get(k, PolygonClass.DEGENERATE.value) for k in keys],
                        dtype=object)

    def score(self, X, y=None, sample_weight=None):
        """Agreement with the geometric classifier when ``y`` is omitted."""
        if y is None:
            y = geometric_labels(X)
        return super().score(X, y, sample_weight)


def geometric_labels(X):
    codes = classify_frames(check_frames(X), epsilon=0.0)
    return np.array([CLASS_CODES[c].value for c in codes], dtype=object)


class FlagMean(TransformerMixin, BaseEstimator):
    """Flag mean of a collection of planes.

    After ``fit``, ``components_`` is the ``(n, 2)`` orthonormal basis of the
    mean plane and ``singular_values_`` the spectrum of the concatenated
    frames. ``transform`` returns each frame's projection distance to the
    mean, ``||A A^T - M M^T||_F / sqrt(2)``.
    """

    def fit(self, X, y=None):
        X = check_frames(X)
        self.components_ = flag_mean(X).matrix
        self.singular_values_ = singular_values(X)
        self.n_features_in_ = 2 * X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_frames(X)
        M = self.components_
        overlap = np.einsum("mik,il->mkl", X, M)
        sq = 2.0 - (overlap ** 2).sum(axis=(1, 2))
        return np.sqrt(np.clip(sq, 0.0, None))[:, None]
