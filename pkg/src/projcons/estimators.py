"""Estimator wrappers with the scikit-learn fit/transform interface.

``fit`` takes a dependency matrix ``A`` (agents x agents).  ``transform``
and ``predict`` take initial opinion vectors, one sample per row, so a fitted
estimator maps many initial states through the same network at once and
drops into pipelines and ``clone``/``get_params`` tooling.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .dynamics import consensus_check
from .laplacian import build_laplacian
from .matrix_kernel import to_float
from .projection import build_projection
from .validation import check_dependency_matrix, check_states, resolve_exact

__all__ = ["ForestConsensus", "ProjectionConsensus"]


def _apply(X, M, exact):
    if exact and X.dtype == object:
        return X @ M.T
    return X @ to_float(M).T


class ForestConsensus(TransformerMixin, BaseEstimator):
    """Limit of the basic protocol ``dx/dt = -L x``.

    ``transform`` returns ``J x0`` for each row ``x0``, where ``J`` is the
    eigenprojection of ``L`` (the normalized matrix of maximum in-forests).

    Parameters
    ----------
    exact : {"auto", True, False}, default="auto"
        Rational arithmetic for integer/Fraction input when "auto".

    Attributes
    ----------
    system_ : LaplacianSystem
    eigenprojection_ : ndarray of shape (n_agents, n_agents)
    n_final_classes_ : int
    final_classes_ : tuple of tuples
    n_features_in_ : int
    """

    def __init__(self, exact="auto"):
        self.exact = exact

    def fit(self, X, y=None):
        A = check_dependency_matrix(X, self.exact)
        self.exact_ = resolve_exact(self.exact, X)
        self.system_ = build_laplacian(A, exact=self.exact_)
        self.eigenprojection_ = self.system_.eigenprojection
        self.n_final_classes_ = self.system_.d
        self.final_classes_ = self.system_.structure.final_classes
        self.n_features_in_ = A.shape[0]
        return self

    def transform(self, X):
        check_is_fitted(self, "eigenprojection_")
        X = check_states(X, self.n_features_in_, self.exact_)
        return _apply(X, self.eigenprojection_, self.exact_)

    def reaches_consensus(self, X, tol=1e-8):
        """Boolean per sample: does the basic protocol end in consensus?"""
        return np.array([consensus_check(row, tol) for row in self.transform(X)])


class ProjectionConsensus(TransformerMixin, BaseEstimator):
    """Quasi-consensus by orthogonal projection of the initial state.

    Fitting computes the projection ``S`` onto ``R(L) + span(1)``, the
    alternative protocol matrices ``P S`` and ``(I - S)/tau + L S`` and the
    rank-one map ``J S``.  ``transform`` returns the limiting state
    ``J S x0``; ``predict`` returns the common consensus value.

    Parameters
    ----------
    tau : scalar or None, default=None
        Step parameter; ``None`` means half the stochasticity bound.
    chosen : sequence of int or None, default=None
        One vertex per final class whose Laplacian column is dropped.
        The projection does not depend on this choice.
    exact : {"auto", True, False}, default="auto"
    """

    def __init__(self, tau=None, chosen=None, exact="auto"):
        self.tau = tau
        self.chosen = chosen
        self.exact = exact

    def fit(self, X, y=None):
        A = check_dependency_matrix(X, self.exact)
        self.exact_ = resolve_exact(self.exact, X)
        self.system_ = build_laplacian(A, exact=self.exact_)
        bundle = build_projection(self.system_, self.tau, self.chosen)
        self.bundle_ = bundle
        self.tau_ = bundle.tau
        self.u_ = bundle.u
        self.projection_ = bundle.s
        self.p_tilde_ = bundle.p_tilde
        self.l_tilde_ = bundle.l_tilde
        self.eigenprojection_ = self.system_.eigenprojection
        self.quasi_consensus_ = bundle.quasi_consensus
        self.weights_ = bundle.weights
        self.n_final_classes_ = self.system_.d
        self.n_features_in_ = A.shape[0]
        return self

    def transform(self, X):
        check_is_fitted(self, "quasi_consensus_")
        X = check_states(X, self.n_features_in_, self.exact_)
        return _apply(X, self.quasi_consensus_, self.exact_)

    def predict(self, X):
        """Quasi-consensus value of each initial state."""
        return self.transform(X)[:, 0]

    def project(self, X):
        """Orthogonal projection ``S x0`` of each initial state."""
        check_is_fitted(self, "projection_")
        X = check_states(X, self.n_features_in_, self.exact_)
        return _apply(X, self.projection_, self.exact_)

    def in_domain(self, X, tol=1e-9):
        """Boolean per sample: is ``x0`` already in the consensus domain?"""
        X = check_states(X, self.n_features_in_, self.exact_)
        SX = self.project(X)
        if X.dtype == object and SX.dtype == object:
            return np.array([(a == b).all() for a, b in zip(SX, X)])
        X, SX = to_float(X), to_float(SX)
        scale = np.abs(X).max(axis=1)
        return np.abs(SX - X).max(axis=1) <= tol * scale
