"""Nested multi-qubit bound tests.

The two weight sums obey a closed linear system: the identity-word weight
feeds the error weights at rate J1 per channel and vice versa, which is what
the small ODE cross-check below integrates directly.
"""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from ddbound.nudd_bounds import (
    NUDD_SWEEP_COLUMNS,
    NuddCouplings,
    NuddSweepConfig,
    d_min_for_orders,
    gamma_factor,
    nudd_delta,
    nudd_distance_bound,
    nudd_eps_window,
    nudd_g,
    nudd_leading_term,
    nudd_sweep,
    nudd_sweep_row,
    nudd_taylor_coeff,
    preset_nudd_cells,
    s_error_sum,
    s_identity_sum,
)
from ddbound.qdd_bounds import default_eps_grid
from ddbound.series import NonConvergenceError


def test_gamma_factor_values():
    assert gamma_factor(1) == 3
    assert gamma_factor(2) == 15
    assert gamma_factor(10) == 4**10 - 1
    assert isinstance(gamma_factor(31), int)
    with pytest.raises(ValueError):
        gamma_factor(0)
    with pytest.raises(ValueError):
        gamma_factor(32)


def test_d_min_uses_requested_orders():
    # the appended frame-closing pulse does not raise the suppression order,
    # so the minimum is over the requested orders, odd ones included
    assert d_min_for_orders((1, 1)) == 1
    assert d_min_for_orders((1, 1, 1, 1)) == 1
    assert d_min_for_orders((4, 2, 6, 2)) == 2
    assert d_min_for_orders((3, 5)) == 3
    with pytest.raises(ValueError):
        d_min_for_orders(())
    with pytest.raises(ValueError):
        d_min_for_orders((1, 2, 3))


def test_identity_error_sum_partition():
    rng = np.random.default_rng(7)
    for _ in range(30):
        m = int(rng.integers(1, 5))
        j0 = float(rng.uniform(0.1, 2.0))
        j1 = float(rng.uniform(0.0, 1.0))
        T = float(rng.uniform(0.0, 1.0))
        g = gamma_factor(m)
        total = s_identity_sum(T, j0, j1, m) + s_error_sum(T, j0, j1, m)
        assert total == pytest.approx(math.exp((j0 + g * j1) * T), rel=1e-13)


def test_error_sum_boundary_values():
    assert s_error_sum(0.0, 1.0, 0.5, 2) == 0.0
    assert s_error_sum(0.7, 1.0, 0.0, 2) == 0.0
    assert s_identity_sum(0.0, 1.0, 0.5, 2) == 1.0


def test_taylor_coeffs_reproduce_error_sum():
    j0, j1, m, T = 0.8, 0.3, 2, 0.2
    acc = sum(nudd_taylor_coeff(k, j0, j1, m) * T**k for k in range(40))
    assert acc == pytest.approx(s_error_sum(T, j0, j1, m), rel=1e-12)


def test_taylor_coeff_anchors():
    g = gamma_factor(3)
    assert nudd_taylor_coeff(0, 1.0, 0.5, 3) == 0.0
    assert nudd_taylor_coeff(1, 1.0, 0.5, 3) == pytest.approx(g * 0.5)
    for k in range(12):
        assert nudd_taylor_coeff(k, 1.3, 0.4, 3) >= 0.0


def test_g_matches_taylor_at_unit_j0():
    for l in range(8):
        for eta in (0.0, 0.3, 2.0):
            for m in (1, 2, 6):
                assert nudd_g(l, eta, m) == pytest.approx(
                    nudd_taylor_coeff(l, 1.0, eta, m), rel=1e-15, abs=1e-300
                )


def test_delta_completes_partial_sum():
    m, eta, eps = 2, 0.6, 0.2
    for d in (0, 1, 3):
        head = sum(nudd_g(l, eta, m) * eps**l for l in range(d + 1))
        total = nudd_delta(d, eps, eta, m) + head
        assert total == pytest.approx(s_error_sum(eps, 1.0, eta, m), rel=1e-12)


def test_delta_zero_cases():
    assert nudd_delta(3, 0.0, 0.5, 2) == 0.0
    assert nudd_delta(3, 0.5, 0.0, 2) == 0.0


def test_delta_validation():
    with pytest.raises(ValueError):
        nudd_delta(-1, 0.1, 0.1, 2)
    with pytest.raises(ValueError):
        nudd_delta(1, -0.1, 0.1, 2)
    with pytest.raises(ValueError):
        nudd_delta(1, 0.1, 0.1, 2, rel_tol=0.5)


def test_distance_bound_form():
    rep = nudd_distance_bound(2, 0.1, 0.5, 2)
    assert rep.distance_bound == pytest.approx(rep.delta**2 + rep.delta, rel=1e-15)
    assert rep.leading_term <= rep.delta * (1 + 1e-12)


def test_leading_term_ratio():
    rep = nudd_distance_bound(3, 1e-4, 0.5, 2)
    assert rep.delta / rep.leading_term == pytest.approx(1.0, abs=1e-2)


def test_couplings_container():
    c = NuddCouplings(m=2, J0=2.0, J1=0.5, T=0.3)
    assert c.gamma == 15
    assert c.epsilon == pytest.approx(0.6)
    assert c.eta == pytest.approx(0.25)
    with pytest.raises(ValueError):
        NuddCouplings(m=2, J0=0.0, J1=0.5, T=0.3)
    with pytest.raises(ValueError):
        NuddCouplings(m=2, J0=1.0, J1=-0.5, T=0.3)


def test_ode_cross_check():
    """Integrate the coupled weight-sum system and compare to closed forms.

    The state is (S_0, S_1): the identity-word sum and the per-channel error
    sum; the total error weight is gamma * S_1.
    """
    rng = np.random.default_rng(19)
    for _ in range(3):
        m = int(rng.integers(1, 5))
        g = gamma_factor(m)
        j0 = float(rng.uniform(0.2, 1.5))
        j1 = float(rng.uniform(0.0, 1.0))
        T = float(rng.uniform(0.1, 5.0 / (j0 + g * j1)))
        mat = np.array([[j0, g * j1], [j1, j0 + (g - 1) * j1]])
        sol = solve_ivp(
            lambda t, y: mat @ y,
            (0.0, T),
            np.array([1.0, 0.0]),
            rtol=1e-12,
            atol=1e-14,
        )
        s0_num, s1_num = sol.y[:, -1]
        assert s0_num == pytest.approx(s_identity_sum(T, j0, j1, m), rel=1e-9)
        assert g * s1_num == pytest.approx(
            s_error_sum(T, j0, j1, m), rel=1e-9, abs=1e-12
        )


def test_eps_window_is_scaled_grid():
    eta, m = 1e-2, 10
    scale = 1.0 + gamma_factor(m) * eta
    base = default_eps_grid(1e-4, 1.0, 41)
    win = nudd_eps_window(eta, m)
    assert len(win) == 41
    for b, w in zip(base, win):
        assert w == pytest.approx(b / scale, rel=1e-15)


def test_preset_cells_fig5():
    cells = preset_nudd_cells("fig5")
    assert len(cells) == 16
    assert all(m == 10 for m, _, _ in cells)
    assert {d for _, d, _ in cells} == {5, 10, 20, 40}
    with pytest.raises(ValueError):
        preset_nudd_cells("fig2")


def test_sweep_rows():
    config = NuddSweepConfig(
        eps_grid=tuple(nudd_eps_window(0.5, 2, points=4)),
        cells=((2, 1, 0.5), (2, 3, 0.5)),
    )
    rows = nudd_sweep(config)
    assert len(rows) == 8
    assert all(tuple(r.keys()) == NUDD_SWEEP_COLUMNS for r in rows)
    assert nudd_sweep(config) == rows


def test_sweep_row_values():
    row = nudd_sweep_row(2, 2, 0.05, 0.7)
    rep = nudd_distance_bound(2, 0.05, 0.7, 2)
    assert row["Delta"] == rep.delta
    assert row["D_bound"] == rep.distance_bound


def test_overflow_regime_raises():
    with pytest.raises(NonConvergenceError):
        nudd_delta(5, 1.0, 100.0, 10)
