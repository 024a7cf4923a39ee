"""Laplacian of a dependency matrix and its eigenprojection at zero."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property

import numpy as np

from .digraph import WeightedDigraph, strongly_connected_components
from .exceptions import ConvergenceError, TauRangeError
from .matrix_kernel import (
    as_fraction,
    identity,
    invert,
    is_exact,
    matrix_index,
    nullspace,
    to_exact,
    to_float,
)

__all__ = [
    "LaplacianSystem",
    "build_laplacian",
    "cesaro_limit",
    "check_tau",
    "degroot_matrix",
    "eigenprojection_nullspace",
    "eigenprojection_resolvent",
]


class LaplacianSystem:
    """Dependency matrix ``A`` together with ``L = diag(A 1) - A``.

    Attributes
    ----------
    A, L : ndarray
        Exact (object/Fraction) or float64, matching ``exact``.
    tau_max : Fraction, float or inf
        ``1 / max_i sum_{j != i} a_ij``; infinite when ``A`` has no arcs.
    graph : WeightedDigraph
    structure : ComponentStructure
    d : int
        Number of final classes, i.e. the multiplicity of the zero
        eigenvalue of ``L``.

    The eigenprojection is computed on first access and cached.
    """

    def __init__(self, A, exact=None):
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise ValueError(f"dependency matrix must be square and non-empty, got shape {A.shape}")
        if exact is None:
            exact = A.dtype == object or np.issubdtype(A.dtype, np.integer)
        A = to_exact(A) if exact else to_float(A)
        if not exact and not np.isfinite(A).all():
            raise ValueError("dependency matrix has non-finite entries")
        if (A < 0).any():
            i, j = np.argwhere(A < 0)[0]
            raise ValueError(f"negative dependency weight at ({i}, {j})")
        if (np.diag(A) != 0).any():
            i = int(np.flatnonzero(np.diag(A) != 0)[0])
            raise ValueError(f"nonzero diagonal entry at ({i}, {i})")
        self.exact = bool(exact)
        self.A = A
        self.n = A.shape[0]
        row = A.sum(axis=1)
        L = -A.copy()
        for i in range(self.n):
            L[i, i] = row[i]
        self.L = L
        top = max(row)
        if top == 0:
            self.tau_max = math.inf
        else:
            self.tau_max = (Fraction(1) / top) if exact else 1.0 / float(top)
        self.graph = WeightedDigraph.from_matrix(A, exact=exact)
        self.structure = strongly_connected_components(self.graph)
        self.d = self.structure.d

    def __repr__(self):
        backend = "exact" if self.exact else "float"
        return f"LaplacianSystem(n={self.n}, d={self.d}, backend={backend!r})"

    @cached_property
    def eigenprojection(self) -> np.ndarray:
        """Eigenprojection of ``L`` at zero, in this system's backend."""
        if self.exact:
            return eigenprojection_nullspace(self)
        return eigenprojection_resolvent(self)

    def default_tau(self):
        """Midpoint of the stochasticity range, or 1 when there are no arcs."""
        if math.isinf(self.tau_max):
            return Fraction(1) if self.exact else 1.0
        return self.tau_max / 2


def build_laplacian(A, exact=None) -> LaplacianSystem:
    return LaplacianSystem(A, exact=exact)


def check_tau(sys: LaplacianSystem, tau):
    """Validate ``0 < tau <= tau_max`` and return tau in the system's backend.

    Float ``tau`` in an exact system is rationalized from its decimal form,
    and a value within a relative 1e-12 of ``tau_max`` is snapped to it, so
    ``float(tau_max)`` round-trips.
    """
    if isinstance(tau, str):
        tau = as_fraction(tau)
    if sys.exact:
        tau = as_fraction(tau)
        near_max = (not math.isinf(sys.tau_max)
                    and abs(float(tau) - float(sys.tau_max)) <= 1e-12 * float(sys.tau_max))
        if near_max:
            tau = sys.tau_max
        ok = tau > 0 and (math.isinf(sys.tau_max) or tau <= sys.tau_max)
    else:
        tau = float(tau)
        ok = math.isfinite(tau) and tau > 0 and tau <= float(sys.tau_max) * (1 + 1e-12)
    if not ok:
        raise TauRangeError(
            f"tau={tau} outside the stochasticity range (0, {sys.tau_max}]"
        )
    return tau


def degroot_matrix(sys: LaplacianSystem, tau) -> np.ndarray:
    """Row-stochastic ``P = I - tau L``."""
    tau = check_tau(sys, tau)
    return identity(sys.n, sys.exact) - tau * sys.L


def _mmatrix_inverse(L, t):
    """``(I + t L)^{-1}`` for a Laplacian ``L`` without subtractive cancellation.

    ``I + t L`` is a row diagonally dominant M-matrix with unit row sums.
    Elimination keeps the off-diagonal entries (all <= 0) and the row sums
    (all >= 1) and rebuilds each pivot as ``row sum - sum of off-diagonals``,
    so every operation adds quantities of one sign.  The triangular factors
    then have nonnegative inverses and substitution is cancellation-free too.
    The result is entrywise accurate for arbitrarily large ``t``.
    """
    n = L.shape[0]
    W = t * L
    np.fill_diagonal(W, 0.0)
    rows = np.ones(n)
    piv = np.empty(n)
    mult = np.zeros((n, n))
    for k in range(n):
        piv[k] = rows[k] - W[k, k + 1:].sum()
        for i in range(k + 1, n):
            m = W[i, k] / piv[k]
            if m == 0.0:
                continue
            mult[i, k] = m
            rows[i] -= m * rows[k]
            W[i, k + 1:] -= m * W[k, k + 1:]
    X = np.zeros((n, n))
    for c in range(n):
        y = np.zeros(n)
        y[c] = 1.0
        for i in range(c + 1, n):
            y[i] = -(mult[i, c:i] @ y[c:i])
        x = np.zeros(n)
        for i in range(n - 1, -1, -1):
            x[i] = (y[i] - W[i, i + 1:] @ x[i + 1:]) / piv[i]
        X[:, c] = x
    return X


def eigenprojection_resolvent(sys: LaplacianSystem, tol: float = 1e-12,
                              max_doublings: int = 60) -> np.ndarray:
    """Float eigenprojection as the limit of ``(I + t L)^{-1}``, ``t -> inf``.

    ``t`` runs over ``1, 2, 4, ...``; iteration stops when two successive
    resolvents agree entrywise to ``tol``.
    """
    L = to_float(sys.L)
    prev = _mmatrix_inverse(L, 1.0)
    for k in range(1, max_doublings + 1):
        cur = _mmatrix_inverse(L, 2.0 ** k)
        if np.abs(cur - prev).max() < tol:
            return cur
        prev = cur
    raise ConvergenceError(
        f"resolvent did not settle to {tol:g} within {max_doublings} doublings"
    )


def eigenprojection_nullspace(sys: LaplacianSystem) -> np.ndarray:
    """Exact eigenprojection ``X (Y^T X)^{-1} Y^T``.

    Columns of ``X`` span N(L) and columns of ``Y`` span N(L^T).  This is the
    projection onto N(L) along R(L), valid because ``ind L = 1``, which is
    checked rather than assumed.
    """
    L = sys.L if sys.exact else to_exact(sys.L)
    nu = matrix_index(L)
    if nu != 1:
        raise ValueError(f"Laplacian has index {nu}, expected 1; input is corrupted")
    X = nullspace(L)
    Y = nullspace(L.T)
    return X @ invert(Y.T @ X) @ Y.T


def cesaro_limit(P, tol: float = 1e-10, max_doublings: int = 60) -> np.ndarray:
    """Limit of the averages ``(1/k) sum_{i=1..k} P^i`` of a stochastic matrix.

    The averages at ``k = 2^j`` obey ``C_{2k} = (I + P^k) C_k / 2``, so
    ``C_{2^j}`` costs ``j`` squarings.  Iteration stops once two successive
    checkpoint averages agree entrywise to ``tol``.

    Powers and averages are renormalized to unit row sums after every step.
    Without this, rounding along the unit eigenvalues is doubled by each
    squaring and overtakes the ``2^-j`` convergence near 1e-8.
    """
    P = to_float(P)
    n = P.shape[0]
    if not np.allclose(P.sum(axis=1), 1.0, atol=1e-12) or (P < -1e-15).any():
        raise ValueError("cesaro_limit expects a row-stochastic matrix")
    P = np.clip(P, 0.0, None)
    power = P.copy()      # P^(2^j)
    avg = P.copy()        # C_(2^j)
    eye = np.eye(n)
    for _ in range(max_doublings):
        nxt = 0.5 * ((eye + power) @ avg)
        nxt /= nxt.sum(axis=1, keepdims=True)
        if np.abs(nxt - avg).max() < tol:
            return nxt
        avg = nxt
        power = power @ power
        power /= power.sum(axis=1, keepdims=True)
    raise ConvergenceError(
        f"Cesaro averages did not settle to {tol:g} within 2**{max_doublings} terms"
    )
