"""Scikit-learn style estimator facade over the implied-mesh interpolant."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .geometry import GeometryTolerances, PointSet, WalkStatus, walk_to_containing_simplex
from .gradient import interpolant_gradient

__all__ = ["DelaunayInterpolator"]


class DelaunayInterpolator(RegressorMixin, BaseEstimator):
    """Piecewise linear interpolation on the Delaunay mesh implied by the data.

    No global triangulation is built; each prediction locates its containing
    simplex by a seeded walk.  Queries outside the convex hull of the training
    points predict nan rather than extrapolating.

    Parameters mirror GeometryTolerances: ``weight_tol`` forgives slightly
    negative barycentric weights at simplex boundaries, ``vol_tol`` rejects
    near-flat simplices, ``dup_tol`` sets the duplicate-point threshold as a
    fraction of the bounding-box diagonal, and ``max_flips_factor`` bounds the
    walk length in units of the training-set size.

    >>> est = DelaunayInterpolator().fit(X, y)
    >>> est.predict(Q)
    """

    def __init__(self, weight_tol: float = 1e-8, vol_tol: float = 1e-12,
                 dup_tol: float = 1e-12, max_flips_factor: int = 10):
        self.weight_tol = weight_tol
        self.vol_tol = vol_tol
        self.dup_tol = dup_tol
        self.max_flips_factor = max_flips_factor

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_min_samples=2, y_numeric=True)
        if X.shape[0] < X.shape[1] + 1:
            raise ValueError(
                f"need at least d + 1 = {X.shape[1] + 1} samples to interpolate")
        tol = GeometryTolerances(
            weight_tol=self.weight_tol,
            vol_tol=self.vol_tol,
            dup_tol=self.dup_tol,
            max_flips_factor=self.max_flips_factor,
        )
        self.pointset_ = PointSet(X, y, tolerances=tol)
        self.n_features_in_ = X.shape[1]
        return self

    def _check_queries(self, X) -> np.ndarray:
        check_is_fitted(self, "pointset_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"query dimension {X.shape[1]} != fitted dimension {self.n_features_in_}")
        return X

    def predict(self, X) -> np.ndarray:
        """Interpolated values; nan for queries outside the convex hull."""
        X = self._check_queries(X)
        ps = self.pointset_
        out = np.full(X.shape[0], np.nan)
        for i, q in enumerate(X):
            res = walk_to_containing_simplex(ps, q)
            if res.status is WalkStatus.INTERIOR:
                idx = list(res.simplex.vertex_indices)
                out[i] = res.weights @ ps.values[idx]
        return out

    def gradient(self, X) -> np.ndarray:
        """Per-query gradient of the interpolant; nan rows outside the hull."""
        X = self._check_queries(X)
        out = np.full((X.shape[0], self.n_features_in_), np.nan)
        for i, q in enumerate(X):
            res = interpolant_gradient(self.pointset_, q)
            if res.gradient is not None:
                out[i] = res.gradient
        return out
