"""Input validation helpers shared by the estimator and analytics code."""

from __future__ import annotations

import numpy as np

__all__ = ["check_feature_matrix", "check_labels", "check_monotone_times"]


def check_feature_matrix(X, n_features: int | None = None) -> np.ndarray:
    """Coerce X to a 2-D float64 array and validate finiteness/width."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"expected 2-D feature matrix, got ndim={X.ndim}")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} features, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    return X


def check_labels(y, n_classes: int) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim == 2:
        # accept one-hot rows
        if y.shape[1] != n_classes:
            raise ValueError(f"one-hot labels must have {n_classes} columns")
        y = np.argmax(y, axis=1)
    y = y.astype(np.int64)
    if y.ndim != 1:
        raise ValueError("labels must be 1-D (or one-hot 2-D)")
    if y.size and (y.min() < 0 or y.max() >= n_classes):
        raise ValueError(f"labels must lie in [0, {n_classes})")
    return y


def check_monotone_times(t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 1:
        raise ValueError("timestamps must be 1-D")
    if t.size >= 2 and np.any(np.diff(t) <= 0):
        raise ValueError("timestamps must be strictly increasing")
    return t
