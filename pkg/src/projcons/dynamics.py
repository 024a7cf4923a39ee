"""Simulation of the basic, projected and alternative consensus protocols."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ConvergenceError
from .laplacian import LaplacianSystem, check_tau
from .matrix_kernel import is_exact, matrix_exponential, to_float

__all__ = [
    "ProtocolKind",
    "SimulationTrace",
    "consensus_check",
    "degroot_iterate",
    "geometric_time_grid",
    "quasi_consensus_limit",
    "run_protocol",
    "simulate_continuous",
    "simulate_ode",
]

CONVERGENCE_TOL = 1e-10
CONSENSUS_TOL = 1e-8
WINDOW = 10
MAX_ODE_STEPS = 10 ** 7


class ProtocolKind(enum.Enum):
    BASIC = "basic"                        # dx/dt = -L x
    PROJECTED = "projected"                # dx/dt = -L x from S x(0)
    LTILDE = "ltilde"                      # dx/dt = -L~ x
    DEGROOT = "degroot"                    # y(k) = P^k y(0)
    DEGROOT_PROJECTED = "degroot-proj"     # x(k) = P^k S x(0)

    @property
    def discrete(self) -> bool:
        return self in (ProtocolKind.DEGROOT, ProtocolKind.DEGROOT_PROJECTED)


@dataclass(frozen=True)
class SimulationTrace:
    """States of one protocol run.

    ``times`` are reals for continuous protocols and step indices for
    discrete ones; ``states[i]`` is the state at ``times[i]``.  For discrete
    runs ``cesaro_states[k]`` is the running average of ``y(1..k)`` (row 0
    repeats ``y(0)``), and ``period`` is the detected period of the tail,
    if any.
    """

    kind: ProtocolKind
    times: np.ndarray
    states: np.ndarray
    converged: bool
    limit: np.ndarray
    consensus: bool
    tol: float = CONVERGENCE_TOL
    consensus_tol: float = CONSENSUS_TOL
    cesaro_states: Optional[np.ndarray] = None
    cesaro_converged: Optional[bool] = None
    cesaro_limit: Optional[np.ndarray] = None
    period: Optional[int] = None

    @property
    def n(self) -> int:
        return self.states.shape[1]


def consensus_check(x, tol: float = CONSENSUS_TOL) -> bool:
    """``max(x) - min(x) <= tol``."""
    x = np.asarray(x)
    if is_exact(x) and tol == 0:
        return max(x) == min(x)
    x = to_float(x)
    return bool(x.max() - x.min() <= tol)


def geometric_time_grid(tau, max_power: int = 16, t_max=None) -> np.ndarray:
    """``0, tau, 2 tau, 4 tau, ...``.

    Stops at ``2**max_power * tau``, or, when ``t_max`` is given, at the
    first point reaching ``t_max`` (which is then replaced by ``t_max``).
    """
    tau = float(tau)
    if t_max is None:
        return np.array([0.0] + [tau * 2.0 ** j for j in range(max_power + 1)])
    t_max = float(t_max)
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    grid = [0.0]
    t = tau
    while t < t_max:
        grid.append(t)
        t *= 2
    grid.append(t_max)
    return np.array(grid)


def _check_zero_row_sums(M):
    if is_exact(M):
        ok = all(s == 0 for s in M.sum(axis=1))
    else:
        scale = max(1.0, float(np.abs(M).max()))
        ok = bool(np.abs(M.sum(axis=1)).max() <= 1e-9 * scale)
    if not ok:
        raise ValueError("protocol matrix must have zero row sums")


def simulate_continuous(M, x0, times=None, *, tau=1.0, tol: float = CONVERGENCE_TOL,
                        consensus_tol: float = CONSENSUS_TOL,
                        kind: ProtocolKind = ProtocolKind.BASIC) -> SimulationTrace:
    """States ``x(t) = exp(-M t) x0`` on a grid of times.

    The run counts as converged when the last two checkpoints differ by less
    than ``tol`` in the max norm.  ``times`` defaults to the geometric grid
    on ``tau``.
    """
    M = np.asarray(M)
    _check_zero_row_sums(M)
    M = to_float(M)
    x0 = to_float(np.asarray(x0))
    if x0.shape != (M.shape[0],):
        raise ValueError(f"x0 has shape {x0.shape}, expected ({M.shape[0]},)")
    times = geometric_time_grid(tau) if times is None else np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0 or (times < 0).any() or (np.diff(times) <= 0).any():
        raise ValueError("times must be nonnegative and strictly increasing")
    states = np.array([matrix_exponential(-M, t) @ x0 for t in times])
    converged = len(times) >= 2 and bool(np.abs(states[-1] - states[-2]).max() < tol)
    limit = states[-1]
    return SimulationTrace(kind, times, states, converged, limit,
                           consensus_check(limit, consensus_tol), tol, consensus_tol)


def simulate_ode(M, x0, t_max: float, dt: float, *, record_every: int = 1,
                 tol: float = CONVERGENCE_TOL, consensus_tol: float = CONSENSUS_TOL,
                 max_steps: int = MAX_ODE_STEPS,
                 kind: ProtocolKind = ProtocolKind.BASIC) -> SimulationTrace:
    """Classical fourth-order Runge-Kutta integration of ``dx/dt = -M x``.

    Agent ``i`` moves by ``-sum_j m_ij x_j``, which for a Laplacian is the
    weighted discrepancy ``-sum_j a_ij (x_i - x_j)``.  The last step is
    shortened to land on ``t_max``.
    """
    if not dt > 0 or not t_max >= dt:
        raise ValueError("need dt > 0 and t_max >= dt")
    M = np.asarray(M)
    _check_zero_row_sums(M)
    M = to_float(M)
    x = to_float(np.asarray(x0)).copy()
    steps = math.ceil(t_max / dt - 1e-9)
    if steps > max_steps:
        raise ConvergenceError(f"{steps} steps exceed the cap of {max_steps}")

    def f(v):
        return -(M @ v)

    t = 0.0
    times, states = [0.0], [x.copy()]
    prev = x.copy()
    for k in range(1, steps + 1):
        h = min(dt, t_max - t) if k == steps else dt
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        prev = x
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t_max if k == steps else t + h
        if k % record_every == 0 or k == steps:
            times.append(t)
            states.append(x.copy())
    converged = bool(np.abs(x - prev).max() < tol)
    return SimulationTrace(kind, np.array(times), np.array(states), converged, x,
                           consensus_check(x, consensus_tol), tol, consensus_tol)


def _detect_period(states, tol, window, max_period):
    """Smallest s such that the last ``window`` states repeat with period s."""
    K = len(states) - 1
    for s in range(1, max_period + 1):
        if K - window - s + 1 < 0:
            break
        tail = states[K - window + 1:]
        lagged = states[K - window + 1 - s:K + 1 - s]
        if is_exact(states):
            ok = all((a == b).all() for a, b in zip(tail, lagged))
        else:
            ok = bool(np.abs(tail - lagged).max() < tol)
        if ok:
            return s
    return None


def degroot_iterate(P, y0, k_max: int = 10000, *, tol: float = CONVERGENCE_TOL,
                    window: int = WINDOW, consensus_tol: float = CONSENSUS_TOL,
                    kind: ProtocolKind = ProtocolKind.DEGROOT) -> SimulationTrace:
    """``y(k) = P y(k-1)`` for ``k = 1..k_max`` with running Cesaro averages.

    ``converged`` means the last ``window`` steps each moved less than
    ``tol``.  A Cesaro limit is declared when the tail is periodic: the
    smallest ``s <= n`` with ``|y(k) - y(k-s)| < tol`` over the window.  It
    is then the mean of the last ``s`` states, which is exact for a periodic
    sequence, unlike the running average whose error decays only like 1/k.
    ``limit`` is the plain limit when it exists, else the Cesaro limit, else
    the last state.  Exact inputs are iterated exactly.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    P = np.asarray(P)
    y = np.asarray(y0)
    if is_exact(P) != is_exact(y):
        P, y = to_float(P), to_float(y)
    exact = is_exact(P)
    if not exact:
        P, y = P.astype(float), y.astype(float)
    n = P.shape[0]
    if y.shape != (n,):
        raise ValueError(f"y0 has shape {y.shape}, expected ({n},)")
    states = np.empty((k_max + 1, n), dtype=object if exact else float)
    ces = np.empty_like(states)
    states[0] = y
    ces[0] = y
    total = y * 0
    comp = np.zeros(n)          # Kahan compensation (float only)
    for k in range(1, k_max + 1):
        y = P @ y
        states[k] = y
        if exact:
            total = total + y
        else:
            inc = y - comp
            t = total + inc
            comp = (t - total) - inc
            total = t
        ces[k] = total / k

    w = min(window, k_max)
    steps = states[k_max - w + 1:] - states[k_max - w:k_max]
    if exact:
        converged = all(v == 0 for v in steps.ravel())
    else:
        converged = bool(np.abs(steps).max() < tol)
    period = _detect_period(states, tol, w, n)
    if period is not None:
        tail = states[k_max - period + 1:]
        cesaro_limit = tail.sum(axis=0) / period
    else:
        cesaro_limit = ces[k_max]
    if converged:
        limit = states[k_max]
    else:
        limit = cesaro_limit if period is not None else states[k_max]
    ctol = 0 if exact else consensus_tol
    return SimulationTrace(kind, np.arange(k_max + 1), states, converged, limit,
                           consensus_check(limit, ctol), tol, consensus_tol,
                           cesaro_states=ces, cesaro_converged=period is not None,
                           cesaro_limit=cesaro_limit, period=period)


def quasi_consensus_limit(J, S, x0, tol: float = 1e-10) -> np.ndarray:
    """``J S x0``, checked to be a consensus vector.

    Raises ValueError when the components differ by more than ``tol``
    (exactly, for exact inputs): that means ``J`` and ``S`` do not belong to
    the same Laplacian.
    """
    J, S, x0 = np.asarray(J), np.asarray(S), np.asarray(x0)
    if not (is_exact(J) and is_exact(S) and is_exact(x0)):
        J, S, x0 = to_float(J), to_float(S), to_float(x0)
    if x0.shape != (S.shape[1],) or J.shape[1] != S.shape[0]:
        raise ValueError("dimension mismatch")
    v = J @ (S @ x0)
    ok = (max(v) == min(v)) if is_exact(v) else consensus_check(v, tol)
    if not ok:
        raise ValueError("J S x0 is not a consensus vector; inconsistent J and S")
    return np.full_like(v, v[0])


def run_protocol(sys: LaplacianSystem, kind, x0, *, tau=None, bundle=None,
                 t_max=None, k_max: int = 10000, tol: float = CONVERGENCE_TOL,
                 consensus_tol: float = CONSENSUS_TOL) -> SimulationTrace:
    """Run one protocol on a Laplacian system.

    Continuous protocols use the geometric grid on ``tau`` (up to
    ``2**16 tau``, or up to ``t_max``); discrete ones run ``k_max`` steps in
    float arithmetic.  ``bundle`` may carry a precomputed projection.
    """
    from .projection import build_projection

    kind = ProtocolKind(kind)
    tau = sys.default_tau() if tau is None else check_tau(sys, tau)
    if bundle is None and kind not in (ProtocolKind.BASIC, ProtocolKind.DEGROOT):
        bundle = build_projection(sys, tau)
    x0 = to_float(np.asarray(x0))
    if x0.shape != (sys.n,):
        raise ValueError(f"x0 has length {x0.shape[0] if x0.ndim else 0}, expected {sys.n}")
    if kind.discrete:
        P = to_float(sys.L) * -float(tau) + np.eye(sys.n)
        start = x0 if kind is ProtocolKind.DEGROOT else to_float(bundle.s) @ x0
        return degroot_iterate(P, start, k_max, tol=tol, consensus_tol=consensus_tol,
                               kind=kind)
    grid = geometric_time_grid(tau, t_max=t_max)
    if kind is ProtocolKind.BASIC:
        M, start = sys.L, x0
    elif kind is ProtocolKind.PROJECTED:
        M, start = sys.L, to_float(bundle.s) @ x0
    else:
        M, start = bundle.l_tilde, x0
    return simulate_continuous(M, start, grid, tol=tol, consensus_tol=consensus_tol,
                               kind=kind)
