"""Dense linear algebra over two scalar backends.

Matrices are plain :class:`numpy.ndarray` objects.  The *exact* backend is an
``object`` array whose entries are :class:`fractions.Fraction`; the *float*
backend is a ``float64`` array.  Every routine here dispatches on the dtype,
so exact inputs give exact outputs (no tolerances) and float inputs go through
the explicit thresholds below.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np

from .exceptions import ConvergenceError, SingularMatrixError

__all__ = [
    "PIVOT_RTOL",
    "RANK_RTOL",
    "as_fraction",
    "characteristic_polynomial",
    "eigenvalues",
    "frobenius_norm",
    "identity",
    "inf_norm",
    "invert",
    "is_exact",
    "matrix_exponential",
    "matrix_index",
    "matrix_power",
    "multiply",
    "nullspace",
    "rank",
    "rref",
    "singular_values",
    "to_exact",
    "to_float",
]

# Relative to ||A||_inf.
PIVOT_RTOL = 1e-12
RANK_RTOL = 1e-9

_EXP_TERMS = 20
_EXP_TARGET_NORM = 0.5


def as_fraction(x) -> Fraction:
    """Convert one scalar to a Fraction.

    Floats are rationalized from their shortest decimal representation, so
    ``0.1`` becomes ``1/10`` rather than the nearest binary fraction.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        return Fraction(int(x))
    if isinstance(x, (int, np.integer, Rational)):
        return Fraction(int(x)) if isinstance(x, (int, np.integer)) else Fraction(x)
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"cannot rationalize non-finite value {x!r}")
        return Fraction(repr(float(x)))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def is_exact(A) -> bool:
    return np.asarray(A).dtype == object


def to_exact(A) -> np.ndarray:
    A = np.asarray(A)
    out = np.empty(A.shape, dtype=object)
    for idx, x in np.ndenumerate(A):
        out[idx] = as_fraction(x)
    return out


def to_float(A) -> np.ndarray:
    A = np.asarray(A)
    if A.dtype == object:
        return np.vectorize(float, otypes=[float])(A) if A.size else A.astype(float)
    return A.astype(float, copy=False)


def identity(n: int, exact: bool = False) -> np.ndarray:
    if not exact:
        return np.eye(n)
    out = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def _zero(exact):
    return Fraction(0) if exact else 0.0


def inf_norm(A) -> float:
    """Maximum absolute row sum (max absolute entry for vectors)."""
    A = to_float(A)
    if A.size == 0:
        return 0.0
    if A.ndim == 1:
        return float(np.abs(A).max())
    return float(np.abs(A).sum(axis=1).max())


def frobenius_norm(A) -> float:
    A = to_float(A)
    return float(math.sqrt(float((A * A).sum()))) if A.size else 0.0


def multiply(A, B) -> np.ndarray:
    """Matrix product ``A @ B``; ``B`` may be a vector.

    Raises ValueError on a dimension mismatch or when the operands use
    different backends.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != 2 or B.ndim not in (1, 2):
        raise ValueError("multiply expects a matrix and a matrix or vector")
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} @ {B.shape}")
    if is_exact(A) != is_exact(B):
        raise ValueError("operands use different scalar backends")
    return A @ B


def matrix_power(A, k: int) -> np.ndarray:
    A = np.asarray(A)
    result = identity(A.shape[0], exact=is_exact(A))
    base = A
    while k > 0:
        if k & 1:
            result = result @ base
        base = base @ base
        k >>= 1
    return result


def rref(A, rtol: float = RANK_RTOL):
    """Reduced row echelon form and pivot columns.

    In the float backend, partial pivoting is used and a column whose largest
    remaining entry is below ``rtol * ||A||_inf`` is treated as null.  In the
    exact backend any nonzero entry is a pivot.
    """
    A = np.array(A, copy=True)
    exact = is_exact(A)
    if not exact:
        A = A.astype(float)
    rows, cols = A.shape
    threshold = rtol * inf_norm(A) if not exact else None
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        if exact:
            nz = [i for i in range(r, rows) if A[i, c] != 0]
            if not nz:
                continue
            p = nz[0]
        else:
            p = r + int(np.argmax(np.abs(A[r:, c])))
            if abs(A[p, c]) <= threshold:
                A[r:, c] = 0.0
                continue
        if p != r:
            A[[r, p]] = A[[p, r]]
        A[r] = A[r] / A[r, c]
        for i in range(rows):
            if i != r and A[i, c] != 0:
                A[i] = A[i] - A[i, c] * A[r]
        pivots.append(c)
        r += 1
    return A, tuple(pivots)


def rank(A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(A)[1])


def nullspace(A) -> np.ndarray:
    """Basis of the right null space, one vector per column.

    The basis is the standard one read off the RREF (a free variable set to
    one, the others to zero), so exact inputs give exact rational vectors.
    """
    A = np.asarray(A)
    exact = is_exact(A)
    R, pivots = rref(A)
    n = A.shape[1]
    free = [c for c in range(n) if c not in pivots]
    basis = np.full((n, len(free)), _zero(exact), dtype=object if exact else float)
    for k, f in enumerate(free):
        basis[f, k] = Fraction(1) if exact else 1.0
        for row, p in enumerate(pivots):
            basis[p, k] = -R[row, f]
    return basis


def invert(A) -> np.ndarray:
    """Inverse by Gauss-Jordan elimination.

    Raises :class:`SingularMatrixError` when no nonzero pivot exists (exact)
    or the best pivot is below ``PIVOT_RTOL * ||A||_inf`` (float).
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("invert expects a square matrix")
    exact = is_exact(A)
    n = A.shape[0]
    M = np.array(A, copy=True) if exact else A.astype(float)
    X = identity(n, exact)
    threshold = PIVOT_RTOL * inf_norm(A)
    for c in range(n):
        if exact:
            p = next((i for i in range(c, n) if M[i, c] != 0), None)
            if p is None:
                raise SingularMatrixError("matrix is singular")
        else:
            p = c + int(np.argmax(np.abs(M[c:, c])))
            if not abs(M[p, c]) > threshold:
                raise SingularMatrixError(
                    f"pivot {abs(M[p, c]):.3e} below threshold {threshold:.3e}"
                )
        if p != c:
            M[[c, p]] = M[[p, c]]
            X[[c, p]] = X[[p, c]]
        piv = M[c, c]
        M[c] = M[c] / piv
        X[c] = X[c] / piv
        for i in range(n):
            if i != c and M[i, c] != 0:
                f = M[i, c]
                M[i] = M[i] - f * M[c]
                X[i] = X[i] - f * X[c]
    return X


def matrix_index(A) -> int:
    """Smallest k with rank A^(k+1) == rank A^k (A^0 = I)."""
    A = np.asarray(A)
    n = A.shape[0]
    power = identity(n, exact=is_exact(A))
    prev = n
    for k in range(n + 1):
        power = power @ A
        r = rank(power)
        if r == prev:
            return k
        prev = r
    return n


def characteristic_polynomial(A) -> list:
    """Coefficients of det(xI - A), highest degree first (Faddeev-LeVerrier).

    Exact for exact input; the leading coefficient is 1.
    """
    A = np.asarray(A)
    exact = is_exact(A)
    n = A.shape[0]
    one = Fraction(1) if exact else 1.0
    coeffs = [one]
    M = np.full((n, n), _zero(exact), dtype=A.dtype)
    I = identity(n, exact)
    c = one
    for k in range(1, n + 1):
        M = A @ M + c * I
        c = -np.trace(A @ M) / k
        coeffs.append(c)
    return coeffs


# -- polynomial helpers over Q (coefficient lists, highest degree first) --

def _ptrim(p):
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return list(p[i:])


def _pdivmod(a, b):
    a = _ptrim(a)
    b = _ptrim(b)
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    r = list(a)
    for i in range(len(q)):
        f = r[i] / b[0]
        q[i] = f
        for j, bj in enumerate(b):
            r[i + j] -= f * bj
    return q, _ptrim(r[len(q):] or [Fraction(0)])


def _pmonic(p):
    p = _ptrim(p)
    return [c / p[0] for c in p]


def _pgcd(a, b):
    a, b = _ptrim(a), _ptrim(b)
    while not (len(b) == 1 and b[0] == 0):
        a, b = b, _pdivmod(a, b)[1]
    return _pmonic(a)


def _pderiv(p):
    d = len(p) - 1
    return _ptrim([c * (d - i) for i, c in enumerate(p[:-1])]) or [Fraction(0)]


def _psub(a, b):
    n = max(len(a), len(b))
    a = [Fraction(0)] * (n - len(a)) + list(a)
    b = [Fraction(0)] * (n - len(b)) + list(b)
    return _ptrim([x - y for x, y in zip(a, b)])


def _squarefree(p):
    """Yun's algorithm: [(factor, multiplicity), ...] with squarefree factors."""
    p = _pmonic(p)
    if len(p) == 1:
        return []
    dp = _pderiv(p)
    c = _pgcd(p, dp)
    w = _pdivmod(p, c)[0]
    y = _pdivmod(dp, c)[0]
    z = _psub(y, _pderiv(w))
    out = []
    i = 1
    while len(w) > 1:
        g = _pgcd(w, z)
        if len(g) > 1:
            out.append((g, i))
        w = _pdivmod(w, g)[0]
        y = _pdivmod(z, g)[0]
        z = _psub(y, _pderiv(w))
        i += 1
    return out


def _polished_roots(p):
    coeffs = np.array([float(c) for c in p], dtype=complex)
    roots = np.roots(coeffs)
    dcoeffs = np.polyder(coeffs)
    for _ in range(3):
        val = np.polyval(coeffs, roots)
        der = np.polyval(dcoeffs, roots)
        step = np.where(der != 0, val / np.where(der != 0, der, 1), 0)
        roots = roots - step
    # real coefficients: imaginary dust on a real root is rounding
    dust = np.abs(roots.imag) <= 1e-10 * np.maximum(1.0, np.abs(roots))
    return np.where(dust, roots.real + 0j, roots)


def eigenvalues(A) -> np.ndarray:
    """All eigenvalues with algebraic multiplicity, as a complex array.

    Float input goes to LAPACK (Hessenberg reduction and shifted QR).  Exact
    input is handled through the exact characteristic polynomial: its
    squarefree factors are found in rational arithmetic and only their simple
    roots are computed numerically, so repeated eigenvalues (including
    defective ones) come out to full float precision with exact multiplicity.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("eigenvalues expects a square matrix")
    if A.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    if not is_exact(A):
        try:
            return np.linalg.eigvals(A.astype(float)).astype(complex)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(str(exc)) from exc
    values = []
    for factor, mult in _squarefree(characteristic_polynomial(A)):
        if len(factor) == 2:
            roots = np.array([complex(-factor[1])])
        else:
            roots = _polished_roots(factor)
        for r in roots:
            values.extend([r] * mult)
    return np.array(values, dtype=complex)


def singular_values(A) -> np.ndarray:
    """Square roots of the eigenvalues of ``A @ A.T``, descending."""
    A = to_float(A)
    ev = np.linalg.eigvalsh(A @ A.T)
    ev = np.where((ev < 0) & (ev > -1e-12), 0.0, ev)
    if (ev < 0).any():
        raise ConvergenceError("A A^T has a negative eigenvalue beyond round-off")
    return np.sqrt(ev)[::-1]


def matrix_exponential(A, t: float = 1.0) -> np.ndarray:
    """``exp(t A)`` by scaling and squaring with a truncated Taylor series.

    ``t A`` is scaled by ``2**-s`` so its infinity norm is at most 0.5, the
    series is summed to 20 terms, and the result is squared ``s`` times.
    """
    B = to_float(A) * float(t)
    n = B.shape[0]
    norm = inf_norm(B)
    s = 0
    if norm > _EXP_TARGET_NORM:
        s = int(math.ceil(math.log2(norm / _EXP_TARGET_NORM)))
    B = B / (2.0 ** s)
    term = np.eye(n)
    total = np.eye(n)
    for k in range(1, _EXP_TERMS + 1):
        term = term @ B / k
        total = total + term
    for _ in range(s):
        total = total @ total
    return total
