from fractions import Fraction

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from projcons import (
    ConvergenceError,
    ProtocolKind,
    build_laplacian,
    build_projection,
    consensus_check,
    degroot_iterate,
    quasi_consensus_limit,
    random_digraph,
    run_protocol,
    simulate_continuous,
    simulate_ode,
)
from projcons.dynamics import geometric_time_grid
from projcons.matrix_kernel import to_float


def test_consensus_check():
    assert consensus_check([1.0, 1.0 + 1e-9])
    assert not consensus_check([1.0, 1.1])
    assert consensus_check(np.array([Fraction(1, 3)] * 3, dtype=object), 0)


def test_geometric_grid():
    g = geometric_time_grid(0.5, max_power=3)
    np.testing.assert_allclose(g, [0, 0.5, 1, 2, 4])
    np.testing.assert_allclose(geometric_time_grid(1.0, t_max=5), [0, 1, 2, 4, 5])
    with pytest.raises(ValueError):
        geometric_time_grid(1.0, t_max=0)


def test_continuous_rejects_non_laplacian():
    with pytest.raises(ValueError, match="row sums"):
        simulate_continuous(np.eye(2), [1.0, 2.0])


def test_ode_against_scipy(seven_float):
    L = seven_float.L
    x0 = np.arange(1.0, 8.0)
    tr = simulate_ode(L, x0, t_max=2.0, dt=0.01)
    ref = scipy.integrate.solve_ivp(lambda t, x: -L @ x, (0, 2.0), x0, rtol=1e-11, atol=1e-12)
    np.testing.assert_allclose(tr.limit, ref.y[:, -1], atol=1e-8)
    assert tr.times[-1] == 2.0
    np.testing.assert_allclose(tr.limit, simulate_continuous(L, x0, [0.0, 2.0]).limit, atol=1e-8)


def test_ode_step_cap():
    with pytest.raises(ConvergenceError):
        simulate_ode(np.zeros((2, 2)), [0.0, 1.0], t_max=1.0, dt=1e-3, max_steps=10)


@pytest.mark.parametrize("kind", list(ProtocolKind))
def test_protocol_limits_seven(seven, kind):
    x0 = np.array([3.0, -1.0, 2.0, 5.0, 0.5, 4.0, -2.0])
    b = build_projection(seven)
    J, JS = to_float(seven.eigenprojection), to_float(b.quasi_consensus)
    tr = run_protocol(seven, kind, x0, bundle=b, k_max=4000)
    assert tr.converged
    expected = J @ x0 if kind in (ProtocolKind.BASIC, ProtocolKind.DEGROOT) else JS @ x0
    np.testing.assert_allclose(tr.limit, expected, atol=1e-8)
    assert tr.consensus == (kind not in (ProtocolKind.BASIC, ProtocolKind.DEGROOT))


@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_projected_protocols_always_reach_consensus(n, seed):
    sys = build_laplacian(random_digraph(n, rng=seed).to_matrix())
    x0 = np.random.default_rng(seed).uniform(-5, 5, n)
    b = build_projection(sys)
    target = to_float(b.quasi_consensus) @ x0
    for kind in (ProtocolKind.PROJECTED, ProtocolKind.LTILDE):
        # horizon from the slowest mode, so small spectral gaps still settle
        ev = np.linalg.eigvals(to_float(b.l_tilde))
        slow = min((z.real for z in ev if abs(z) > 1e-9), default=1.0)
        tr = run_protocol(sys, kind, x0, bundle=b, t_max=60.0 / slow)
        np.testing.assert_allclose(tr.limit, target, atol=1e-8)
        assert tr.consensus


def test_degroot_exact_iteration():
    P = np.array([[Fraction(1, 2), Fraction(1, 2)], [Fraction(1, 2), Fraction(1, 2)]], dtype=object)
    tr = degroot_iterate(P, np.array([Fraction(0), Fraction(1)], dtype=object), 12)
    assert tr.converged
    assert list(tr.limit) == [Fraction(1, 2), Fraction(1, 2)]
    assert tr.consensus


def test_degroot_period_three():
    P = np.roll(np.eye(3), 1, axis=1)
    tr = degroot_iterate(P, np.array([0.0, 3.0, 6.0]), 300)
    assert not tr.converged
    assert tr.period == 3
    np.testing.assert_allclose(tr.cesaro_limit, [3.0, 3.0, 3.0], atol=1e-12)
    assert tr.cesaro_states.shape == tr.states.shape


def test_degroot_rejects_bad_k():
    with pytest.raises(ValueError):
        degroot_iterate(np.eye(2), np.zeros(2), 0)


def test_quasi_consensus_limit(seven):
    b = build_projection(seven)
    x0 = np.array([Fraction(k) for k in range(1, 8)], dtype=object)
    v = quasi_consensus_limit(seven.eigenprojection, b.s, x0)
    assert list(v) == [Fraction(162, 55)] * 7
    with pytest.raises(ValueError):
        quasi_consensus_limit(seven.eigenprojection, np.eye(7, dtype=int).astype(object), x0)


def test_run_protocol_validates_x0(seven):
    with pytest.raises(ValueError):
        run_protocol(seven, "basic", np.zeros(3))
