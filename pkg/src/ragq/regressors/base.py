from __future__ import annotations

import numpy as np

from ..errors import InsufficientDataError, NotFittedError


def as_matrix(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D feature matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    return X


def check_xy(X, y, min_rows=2):
    X = as_matrix(X)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.shape[0] != X.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if X.shape[0] < min_rows:
        raise InsufficientDataError(f"need at least {min_rows} rows, got {X.shape[0]}")
    if not np.all(np.isfinite(y)):
        raise ValueError("targets contain non-finite values")
    return X, y


def canonical_order(X, y):
    """Row order sorted by (features..., target), so fits ignore input row order."""
    return np.lexsort((y, *X.T[::-1]))


class Regressor:
    """fit/predict contract shared by every model.

    Subclasses implement ``_fit`` and ``_predict``; ``kind`` names the model in
    saved files.
    """

    kind = "regressor"
    n_features_ = None

    def fit(self, X, y):
        X, y = check_xy(X, y, self._min_rows())
        order = canonical_order(X, y)
        self._fit(X[order], y[order])
        self.n_features_ = X.shape[1]
        return self

    def _min_rows(self):
        return 2

    @property
    def fitted(self):
        return self.n_features_ is not None

    def predict(self, X):
        if not self.fitted:
            raise NotFittedError(f"{type(self).__name__}.predict called before fit")
        X = as_matrix(X)
        if X.shape[1] != self.n_features_:
            raise ValueError(f"model was fitted on {self.n_features_} features, got {X.shape[1]}")
        out = np.asarray(self._predict(X), dtype=np.float64)
        if not np.all(np.isfinite(out)):
            raise FloatingPointError(f"{type(self).__name__} produced non-finite predictions")
        return out

    # serialization hooks: (config dict, {name: float array})
    def get_state(self):
        raise NotImplementedError

    @classmethod
    def from_state(cls, config, arrays):
        raise NotImplementedError
