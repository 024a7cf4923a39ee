"""Instance-level checks of the structural identities, used by ``projcons verify``.

Each check returns a :class:`Check` with a measured residual.  In the exact
backend algebraic identities are compared with equality; float comparisons
use the tolerances listed next to each check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .digraph import MAX_ENUMERATION_VERTICES, forest_matrix
from .dynamics import (
    consensus_check,
    degroot_iterate,
    geometric_time_grid,
    simulate_continuous,
)
from .laplacian import (
    LaplacianSystem,
    cesaro_limit,
    check_tau,
    degroot_matrix,
    eigenprojection_resolvent,
)
from .matrix_kernel import (
    eigenvalues,
    identity,
    is_exact,
    matrix_exponential,
    matrix_index,
    matrix_power,
    rank,
    singular_values,
    to_float,
)
from .projection import (
    approximation_error,
    build_projection,
    consensus_projection,
    representative_choices,
)

__all__ = ["Check", "match_multisets", "run_checks"]

FLOAT_IDENTITY_TOL = 1e-9
MAX_CHOICES = 256


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    detail: str = ""


def _gap(X, Y=None) -> float:
    X = to_float(np.asarray(X)) if not isinstance(X, float) else X
    if Y is not None:
        X = X - to_float(np.asarray(Y))
    return float(np.abs(X).max()) if np.size(X) else 0.0


def _identity_check(name, X, Y, detail=""):
    """Exact equality in the exact backend, FLOAT_IDENTITY_TOL otherwise."""
    X, Y = np.asarray(X), np.asarray(Y)
    if is_exact(X) and is_exact(Y):
        return Check(name, bool((X == Y).all()), _gap(X, Y), detail)
    r = _gap(X, Y)
    return Check(name, r <= FLOAT_IDENTITY_TOL, r, detail)


def _tol_check(name, residual, tol, detail=""):
    return Check(name, bool(residual <= tol), float(residual), detail or f"tol {tol:g}")


def match_multisets(a, b) -> float:
    """Largest distance in a greedy nearest-neighbour pairing of two
    equally sized sets of complex numbers (inf when the sizes differ)."""
    a = list(np.asarray(a, dtype=complex))
    b = list(np.asarray(b, dtype=complex))
    if len(a) != len(b):
        return math.inf
    worst = 0.0
    pairs = sorted(((abs(x - y), i, j) for i, x in enumerate(a) for j, y in enumerate(b)))
    used_a, used_b = set(), set()
    for dist, i, j in pairs:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        worst = max(worst, dist)
    return worst


def expected_ltilde_spectrum(sys: LaplacianSystem, tau) -> np.ndarray:
    """``{0} + {1/tau} x (d-1) + nonzero eigenvalues of L``."""
    ev = eigenvalues(sys.L)
    nonzero = sorted(ev, key=abs)[sys.d:]
    return np.array([0.0] + [1.0 / float(tau)] * (sys.d - 1) + list(nonzero), dtype=complex)


def run_checks(sys: LaplacianSystem, tau=None) -> list:
    n, d = sys.n, sys.d
    tau = sys.default_tau() if tau is None else check_tau(sys, tau)
    exact = sys.exact
    I = identity(n, exact)
    one = I.sum(axis=1)
    L = sys.L
    J = sys.eigenprojection
    out = []

    # Laplacian and eigenprojection
    out.append(_identity_check("L 1 = 0", L @ one, one * 0))
    if n <= MAX_ENUMERATION_VERTICES:
        out.append(_identity_check("forest matrix = eigenprojection", forest_matrix(sys.graph), J,
                                   "exhaustive maximum in-forest enumeration"))
    out.append(_identity_check("J^2 = J", J @ J, J))
    out.append(_identity_check("L J = 0", L @ J, I * 0))
    out.append(_identity_check("J L = 0", J @ L, I * 0))
    out.append(_identity_check("J 1 = 1", J @ one, one))
    out.append(Check("J >= 0", bool((to_float(J) >= -FLOAT_IDENTITY_TOL).all()),
                     max(0.0, -float(to_float(J).min()))))
    out.append(_tol_check("resolvent limit = J", _gap(eigenprojection_resolvent(sys), J), 1e-8))
    evL = eigenvalues(L)
    zeros = int(np.sum(np.abs(evL) < 1e-8))
    out.append(Check("zero eigenvalue multiplicity = d", zeros == d, float(abs(zeros - d)),
                     f"{zeros} zero eigenvalues, d = {d}"))
    nonzero = [z for z in evL if abs(z) >= 1e-8]
    min_re = min((z.real for z in nonzero), default=math.inf)
    out.append(Check("nonzero eigenvalues of L have Re > 0", min_re > 0,
                     0.0 if min_re > 0 else -min_re, f"min Re = {min_re:.6g}"))
    if exact:
        out.append(Check("ind L = 1", matrix_index(L) == 1, 0.0))

    # projection
    b = build_projection(sys, tau)
    S, P, JS, LT = b.s, b.p, b.quasi_consensus, b.l_tilde
    out.append(_identity_check("S^2 = S", S @ S, S))
    out.append(_identity_check("S^T = S", S.T, S))
    out.append(_identity_check("S 1 = 1", S @ one, one))
    out.append(_identity_check("S L = L", S @ L, L))
    out.append(_identity_check("S L S = L S", S @ L @ S, L @ S))
    rS = rank(S)
    out.append(Check("rank S = n - d + 1", rS == n - d + 1, float(abs(rS - (n - d + 1)))))
    choices = list(itertools.islice(representative_choices(sys), MAX_CHOICES))
    worst = max(_gap(consensus_projection(sys, c), S) for c in choices)
    same = all((consensus_projection(sys, c) == S).all() for c in choices) if exact \
        else worst <= FLOAT_IDENTITY_TOL
    out.append(Check("S independent of final-class representatives", bool(same), worst,
                     f"{len(choices)} selections"))
    out.append(_identity_check("S J S = J S", S @ JS, JS))
    rJS = rank(JS)
    out.append(Check("rank J S = 1", rJS == 1, float(abs(rJS - 1))))
    out.append(_identity_check("P~ 1 = 1", b.p_tilde @ one, one))
    out.append(_identity_check("L~ 1 = 0", LT @ one, one * 0))
    worst_k = 0.0
    ok = True
    for k in range(1, 11):
        lhs, rhs = matrix_power(b.p_tilde, k), matrix_power(P, k) @ S
        worst_k = max(worst_k, _gap(lhs, rhs))
        ok = ok and ((lhs == rhs).all() if exact else _gap(lhs, rhs) <= FLOAT_IDENTITY_TOL)
    out.append(Check("(P S)^k = P^k S, k = 1..10", bool(ok), worst_k))
    out.append(_tol_check("spectrum of L~", match_multisets(eigenvalues(LT),
                                                            expected_ltilde_spectrum(sys, tau)), 1e-6))
    sv = singular_values(LT)
    mult = int(np.sum(np.abs(sv - 1.0 / float(tau)) <= 1e-6))
    out.append(Check("singular values of L~ contain 1/tau (d - 1) times", mult >= d - 1,
                     float(max(0, d - 1 - mult)), f"multiplicity {mult}"))
    out.append(_identity_check("L~ J S = 0", LT @ JS, I * 0))
    out.append(_identity_check("J S L~ = 0", JS @ LT, I * 0))
    out.append(Check("ind L~ = 1", matrix_index(LT) == 1, 0.0))

    # exponential identities and limits
    Sf, Lf, LTf, Jf, JSf = (to_float(X) for X in (S, L, LT, J, JS))
    If = np.eye(n)
    taus = float(tau)
    worst_exp = 0.0
    for t in (taus, 10 * taus, 100 * taus):
        lhs1 = matrix_exponential(-(If - Sf) / taus, t)
        rhs1 = Sf + (If - Sf) * math.exp(-t / taus)
        lhs2 = matrix_exponential(-(Lf @ Sf), t)
        rhs2 = If - Sf + matrix_exponential(-Lf, t) @ Sf
        worst_exp = max(worst_exp, _gap(lhs1, rhs1), _gap(lhs2, rhs2))
    out.append(_tol_check("exp identities for (I - S)/tau and L S", worst_exp, 1e-9))
    out.append(_tol_check("exp(-L~ t) -> J S at t = 1000 tau",
                          _gap(matrix_exponential(-LTf, 1000 * taus), JSf), 1e-8))
    t_end = geometric_time_grid(taus)[-1]
    out.append(_tol_check("exp(-L t) -> J", _gap(matrix_exponential(-Lf, t_end), Jf), 1e-8,
                          f"t = {t_end:.6g}"))
    lim_proj, lim_lt, spread = 0.0, 0.0, 0.0
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        proj = simulate_continuous(Lf, Sf @ e, geometric_time_grid(taus)).limit
        alt = simulate_continuous(LTf, e, geometric_time_grid(taus)).limit
        lim_proj = max(lim_proj, _gap(proj, JSf @ e))
        lim_lt = max(lim_lt, _gap(alt, proj))
        spread = max(spread, float(proj.max() - proj.min()))
    out.append(_tol_check("projected protocol limit = J S x0", lim_proj, 1e-8))
    out.append(_tol_check("projected limit is a consensus", spread, 1e-8))
    out.append(_tol_check("L~ protocol limit = projected limit", lim_lt, 1e-8))

    # approximation error
    ae = approximation_error(sys, S, tau)
    decomp = math.sqrt(float(ae.tau_term) + float(ae.residual_term))
    out.append(_tol_check("||L~ - L||_E closed form", abs(ae.norm - decomp), 1e-10))
    if d >= 2 and not math.isinf(sys.tau_max):
        grid = [sys.tau_max / 8, sys.tau_max / 4, sys.tau_max / 2, sys.tau_max]
        norms = [approximation_error(sys, S, t).norm for t in grid]
        floor = math.sqrt(float(ae.residual_term))
        decreasing = all(a > b for a, b in zip(norms, norms[1:])) and norms[-1] > floor
        out.append(Check("||L~(tau) - L||_E decreases to above ||L S - L||_E", decreasing,
                         norms[-1] - floor, ", ".join(f"{v:.6g}" for v in norms)))

    # discrete protocol
    out.append(_tol_check("Cesaro limit of P = J", _gap(cesaro_limit(P), J), 1e-8))
    if not math.isinf(sys.tau_max):
        Pmax = degroot_matrix(sys, sys.tau_max)
        out.append(_tol_check("Cesaro limit of P(tau_max) = J", _gap(cesaro_limit(Pmax), J), 1e-8))
    if math.isinf(sys.tau_max) or float(tau) < float(sys.tau_max):
        Pf = to_float(P)
        worst_deg = 0.0
        for k in range(n):
            e = np.zeros(n)
            e[k] = 1.0
            tr = degroot_iterate(Pf, e, 20000)
            worst_deg = max(worst_deg, _gap(tr.states[-1], Jf @ e))
        out.append(_tol_check("P^k y0 -> J y0", worst_deg, 1e-8))
    qc = [consensus_check(JSf @ np.random.default_rng(k).standard_normal(n), 1e-9) for k in range(5)]
    out.append(Check("J S x0 is a consensus vector", all(qc), 0.0))
    return out
