"""Input validation shared by the estimators."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .matrix_kernel import to_exact

__all__ = ["check_dependency_matrix", "check_states", "resolve_exact"]


def resolve_exact(exact, X) -> bool:
    """Turn ``"auto"``/bool into a backend choice for input ``X``.

    ``"auto"`` picks the exact backend for integer and object (Fraction)
    arrays and float64 otherwise.
    """
    if exact == "auto":
        dtype = np.asarray(X).dtype
        return dtype == object or np.issubdtype(dtype, np.integer)
    if exact in (True, False):
        return bool(exact)
    raise ValueError(f"exact must be 'auto', True or False, got {exact!r}")


def check_dependency_matrix(A, exact="auto") -> np.ndarray:
    """Validate a dependency matrix: square, nonnegative, zero diagonal."""
    use_exact = resolve_exact(exact, A)
    if use_exact:
        A = to_exact(np.asarray(A))
        if A.ndim != 2:
            raise ValueError(f"expected a 2-D dependency matrix, got {A.ndim}-D")
    else:
        A = check_array(A, dtype=np.float64, ensure_2d=True)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"dependency matrix must be square, got shape {A.shape}")
    if (A < 0).any():
        raise ValueError("dependency matrix has negative entries")
    if (np.diag(A) != 0).any():
        raise ValueError("dependency matrix must have a zero diagonal")
    return A


def check_states(X, n_agents: int, exact: bool = False) -> np.ndarray:
    """Validate initial states as an ``(n_samples, n_agents)`` array.

    A single 1-D state vector is accepted and treated as one sample.  Exact
    arrays stay exact only when ``exact`` is set.
    """
    X = np.asarray(X)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if exact and (X.dtype == object or np.issubdtype(X.dtype, np.integer)):
        X = to_exact(X)
        if X.ndim != 2:
            raise ValueError("expected 2-D initial states")
    else:
        X = check_array(X, dtype=np.float64)
    if X.shape[1] != n_agents:
        raise ValueError(
            f"X has {X.shape[1]} features, but the estimator was fitted on {n_agents} agents"
        )
    return X
