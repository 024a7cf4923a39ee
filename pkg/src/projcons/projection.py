"""Orthogonal projection onto the consensus domain and the derived protocols.

The consensus domain of ``dx/dt = -L x`` is ``R(L) + span(1)``.  ``S`` is the
orthogonal projection onto it, ``P~ = P S`` is the discrete protocol that
folds the projection into every step, and
``L~ = (I - S) / tau + L S`` is its continuous counterpart.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .laplacian import LaplacianSystem, check_tau, degroot_matrix
from .matrix_kernel import (
    as_fraction,
    frobenius_norm,
    identity,
    invert,
    is_exact,
    to_float,
)

__all__ = [
    "ApproximationError",
    "ProjectionBundle",
    "approximation_error",
    "build_projection",
    "build_u_matrix",
    "consensus_projection",
    "default_representatives",
    "in_consensus_domain",
    "l_tilde",
    "orthogonal_projection_s",
    "p_tilde",
    "project_initial",
    "representative_choices",
]


def default_representatives(sys: LaplacianSystem) -> tuple:
    """Smallest vertex of every final class."""
    return tuple(cls[0] for cls in sys.structure.final_classes)


def representative_choices(sys: LaplacianSystem):
    """Every way of picking one vertex per final class."""
    return itertools.product(*sys.structure.final_classes)


def build_u_matrix(sys: LaplacianSystem, chosen: Optional[Sequence[int]] = None) -> np.ndarray:
    """``[1 | columns of L except the chosen ones]``.

    ``chosen`` holds one (0-based) vertex from each final class; the
    remaining columns keep their ascending order.
    """
    if chosen is None:
        chosen = default_representatives(sys)
    chosen = [int(v) for v in chosen]
    comp_of = sys.structure.component_of
    final = set(sys.structure.final)
    hit = set()
    for v in chosen:
        if not 0 <= v < sys.n:
            raise ValueError(f"vertex {v} out of range")
        c = comp_of[v]
        if c not in final:
            raise ValueError(f"vertex {v} is not in a final class")
        if c in hit:
            raise ValueError(f"two chosen vertices share the final class of vertex {v}")
        hit.add(c)
    if len(hit) != len(final):
        raise ValueError(f"need one vertex from each of the {len(final)} final classes")
    keep = [c for c in range(sys.n) if c not in set(chosen)]
    one = identity(1, sys.exact)[0, 0]
    ones = np.full((sys.n, 1), one, dtype=sys.L.dtype)
    return np.hstack([ones, sys.L[:, keep]])


def orthogonal_projection_s(U) -> np.ndarray:
    """``U (U^T U)^{-1} U^T`` for a full-column-rank ``U``."""
    U = np.asarray(U)
    return U @ invert(U.T @ U) @ U.T


def consensus_projection(sys: LaplacianSystem, chosen=None) -> np.ndarray:
    return orthogonal_projection_s(build_u_matrix(sys, chosen))


def in_consensus_domain(sys: LaplacianSystem, x, tol: float = 1e-9, S=None) -> bool:
    """Whether ``x`` lies in ``R(L) + span(1)``, tested as ``S x == x``.

    Exact systems with exact ``x`` compare exactly and ignore ``tol``;
    otherwise ``||S x - x||_inf <= tol * ||x||_inf``.
    """
    if S is None:
        S = consensus_projection(sys)
    x = np.asarray(x)
    if x.shape != (sys.n,):
        raise ValueError(f"expected a vector of length {sys.n}, got shape {x.shape}")
    if is_exact(S) and is_exact(x):
        return bool(((S @ x) == x).all())
    Sf, xf = to_float(S), to_float(x)
    return bool(np.abs(Sf @ xf - xf).max() <= tol * np.abs(xf).max())


def project_initial(S, x0) -> np.ndarray:
    S = np.asarray(S)
    x0 = np.asarray(x0)
    if S.shape[1] != x0.shape[0]:
        raise ValueError(f"dimension mismatch: {S.shape} @ {x0.shape}")
    if is_exact(S) != is_exact(x0):
        S, x0 = to_float(S), to_float(x0)
    return S @ x0


def p_tilde(P, S) -> np.ndarray:
    """``P S``: unit row sums, but entries may be negative."""
    P, S = np.asarray(P), np.asarray(S)
    if P.shape[1] != S.shape[0]:
        raise ValueError(f"dimension mismatch: {P.shape} @ {S.shape}")
    return P @ S


def l_tilde(sys: LaplacianSystem, S, tau) -> np.ndarray:
    """``(I - S) / tau + L S`` for ``0 < tau <= tau_max``."""
    tau = check_tau(sys, tau)
    S = np.asarray(S)
    L = sys.L if is_exact(S) == sys.exact else to_float(sys.L)
    if not is_exact(S):
        tau = float(tau)
    return (identity(sys.n, is_exact(S)) - S) / tau + L @ S


class ApproximationError(NamedTuple):
    """``||L~(tau) - L||_E`` and the two terms of its square.

    ``norm**2 == tau_term + residual_term`` where
    ``tau_term = trace(I - S) / tau**2`` and
    ``residual_term = trace((L S - L)(S L^T - L^T)) = ||L S - L||_E**2``.
    """

    norm: float
    tau_term: object
    residual_term: object


def approximation_error(sys: LaplacianSystem, S, tau) -> ApproximationError:
    """Distance between ``L~(tau)`` and ``L`` in the Frobenius norm.

    Only ``tau > 0`` is required here; values above ``tau_max`` are allowed
    so the infimum as ``tau`` grows can be explored.
    """
    S = np.asarray(S)
    exact = is_exact(S) and sys.exact
    tau = as_fraction(tau) if exact else float(tau)
    if not tau > 0:
        raise ValueError("tau must be positive")
    if not exact:
        S = to_float(S)
    L = sys.L if exact else to_float(sys.L)
    I = identity(sys.n, exact)
    LT = (I - S) / tau + L @ S
    norm = frobenius_norm(LT - L)
    D = L @ S - L
    tau_term = np.trace(I - S) / (tau * tau)
    residual_term = np.trace(D @ D.T)
    return ApproximationError(norm, tau_term, residual_term)


@dataclass(frozen=True)
class ProjectionBundle:
    """Everything the projection method derives from one Laplacian and tau.

    ``quasi_consensus`` is ``J S``: every row equals the weight vector that
    maps an initial state to its quasi-consensus value.
    """

    u: np.ndarray
    s: np.ndarray
    tau: object
    p: np.ndarray
    p_tilde: np.ndarray
    l_tilde: np.ndarray
    quasi_consensus: np.ndarray
    chosen: tuple

    @property
    def weights(self) -> np.ndarray:
        """Common row of ``J S``."""
        return self.quasi_consensus[0]


def build_projection(sys: LaplacianSystem, tau=None, chosen=None) -> ProjectionBundle:
    if tau is None:
        tau = sys.default_tau()
    tau = check_tau(sys, tau)
    if chosen is None:
        chosen = default_representatives(sys)
    U = build_u_matrix(sys, chosen)
    S = orthogonal_projection_s(U)
    P = degroot_matrix(sys, tau)
    return ProjectionBundle(
        u=U,
        s=S,
        tau=tau,
        p=P,
        p_tilde=p_tilde(P, S),
        l_tilde=l_tilde(sys, S, tau),
        quasi_consensus=sys.eigenprojection @ S,
        chosen=tuple(int(v) for v in chosen),
    )
