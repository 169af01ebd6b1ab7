"""Scikit-learn style front end to the embedding ``X -> Y x H``."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points, check_space
from .affine import affine_basis
from .embedding import (
    TildeMetric,
    evaluation_map,
    factor_affine_function,
    quotient_classes,
)
from .hilbert import build_hilbert_model


class AffineSplitting(TransformerMixin, BaseEstimator):
    """Split a geodesic space into its flat part and the rest.

    ``fit`` computes the affine functions of ``space`` and their Hilbert
    model.  ``transform`` sends points to their coordinates ``F(x)`` in
    ``H``; :meth:`tilde_distances` and :meth:`quotient` describe the other
    factor.  ``X`` in ``fit`` is ignored: everything is determined by the
    space itself.

    Parameters
    ----------
    space : Space or dict
        The space, or its JSON-style description.
    basepoint : optional
        Point where every coordinate vanishes; defaults to the space's own.
    tol : float
        Parallelogram tolerance for the Hilbert model, and the class
        tolerance of :meth:`quotient`.
    """

    def __init__(self, space=None, basepoint=None, tol=1e-9):
        self.space = space
        self.basepoint = basepoint
        self.tol = tol

    def fit(self, X=None, y=None):
        space = check_space(self.space)
        o = space.basepoint if self.basepoint is None else check_points(space, [self.basepoint])[0]
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        self.space_ = space
        self.basepoint_ = o
        self.basis_ = affine_basis(space, o)
        self.model_ = build_hilbert_model(space, self.basis_, self.tol)
        self.map_ = evaluation_map(space, self.model_, o)
        self.metric_ = TildeMetric(space, self.map_)
        self.n_components_ = self.model_.dim
        self.gram_ = self.model_.gram
        return self

    def transform(self, X):
        check_is_fitted(self, "map_")
        pts = check_points(self.space_, X)
        if self.n_components_ == 0:
            return np.zeros((len(pts), 0))
        return np.vstack([self.map_(p) for p in pts])

    def tilde_distances(self, X, Y=None):
        """Matrix of ``d~`` between two point lists (``Y`` defaults to ``X``)."""
        check_is_fitted(self, "metric_")
        a = check_points(self.space_, X)
        b = a if Y is None else check_points(self.space_, Y)
        return np.array([[self.metric_.distance(p, q) for q in b] for p in a])

    def quotient(self, X):
        check_is_fitted(self, "metric_")
        return quotient_classes(self.metric_, check_points(self.space_, X), self.tol)

    def factor(self, f, seed=0):
        """Coefficients and offset of ``f`` as an affine form on ``H``."""
        check_is_fitted(self, "map_")
        return factor_affine_function(f, self.map_, self.model_, seed=seed)
