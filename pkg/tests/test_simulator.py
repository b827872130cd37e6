"""Exact propagator simulator tests.

Cross-checks against closed forms: a pulse-free run with a one-dimensional
bath is plain Larmor precession, so the protected-state distance is
|sin(b_z T)| for a |+> probe, and any commuting dephasing bath is refocused
exactly by a single outer level.
"""

import math

import numpy as np
import pytest

from ddbound.sequences import nudd_schedule, qdd_schedule
from ddbound.simulator import (
    BathSpec,
    ExperimentConfig,
    build_model,
    evolve,
    extract_channel_ops,
    fit_scaling,
    partial_trace_bath,
    pauli_labels,
    pauli_matrix,
    random_bath,
    reconstruct_from_channels,
    run_experiment,
    spectral_norm,
    trace_distance,
    unitarity_residuals,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def test_pauli_labels():
    assert pauli_labels(1) == ("0", "x", "y", "z")
    labels2 = pauli_labels(2)
    assert len(labels2) == 16
    assert labels2[0] == "00" and "xz" in labels2


def test_pauli_matrix_kron_order():
    got = pauli_matrix("xz")
    assert np.array_equal(got, np.kron(SX, SZ))
    assert np.array_equal(pauli_matrix("0"), np.eye(2))


def test_random_bath_properties():
    b = random_bath(8, 0.7, 3)
    assert np.allclose(b, b.conj().T)
    assert np.linalg.norm(b, 2) == pytest.approx(0.7, rel=1e-12)
    assert np.array_equal(random_bath(8, 0.7, 3), b)  # deterministic
    assert not np.array_equal(random_bath(8, 0.7, 4), b)
    assert np.all(random_bath(4, 0.0, 5) == 0.0)


def test_bath_spec_validation():
    with pytest.raises(ValueError):
        BathSpec(dim=3, seed=0, norms={"0": 1.0})
    with pytest.raises(ValueError):
        BathSpec(dim=4, seed=0, norms={"0": -1.0})
    spec = BathSpec(dim=4, seed=0, norms={"0": 1.0})
    assert spec.norm("x") == 0.0


def test_build_model_shapes_and_limits():
    bath = BathSpec(dim=4, seed=1, norms={"0": 1.0, "z": 0.5})
    model = build_model(bath, 1)
    assert model.hamiltonian.shape == (8, 8)
    assert np.allclose(model.hamiltonian, model.hamiltonian.conj().T)
    assert set(model.couplings) == {"0", "x", "y", "z"}
    assert np.all(model.couplings["x"] == 0.0)
    assert np.linalg.norm(model.couplings["z"], 2) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(ValueError):
        build_model(BathSpec(dim=256, seed=0, norms={"0": 1.0}), 1)
    with pytest.raises(ValueError):
        build_model(BathSpec(dim=4, seed=0, norms={"0": 1.0}), 3)
    with pytest.raises(ValueError):
        build_model(BathSpec(dim=4, seed=0, norms={"q": 1.0}), 1)


def test_model_matches_explicit_sum():
    bath = BathSpec(dim=2, seed=9, norms={"0": 1.0, "x": 0.4, "z": 0.2})
    model = build_model(bath, 1)
    h = sum(
        np.kron(pauli_matrix(label), mat) for label, mat in model.couplings.items()
    )
    assert np.allclose(model.hamiltonian, h)


def test_evolve_free_evolution():
    """Without pulses the propagator is the bare matrix exponential."""
    bath = BathSpec(dim=4, seed=2, norms={"0": 1.0, "y": 0.3})
    model = build_model(bath, 1)
    sched = qdd_schedule(0, 0)
    assert len(sched.events) == 0
    u = evolve(sched, model, 0.7)
    w, v = np.linalg.eigh(model.hamiltonian)
    expected = (v * np.exp(-1j * w * 0.7)) @ v.conj().T
    assert np.allclose(u, expected, atol=1e-12)


def test_evolve_is_unitary():
    bath = BathSpec(dim=8, seed=3, norms={"0": 1.0, "x": 0.5, "y": 0.5, "z": 0.5})
    model = build_model(bath, 1)
    u = evolve(qdd_schedule(2, 2), model, 0.4)
    assert np.allclose(u @ u.conj().T, np.eye(16), atol=1e-12)


def test_channel_extraction_roundtrip():
    bath = BathSpec(dim=4, seed=4, norms={"0": 1.0, "x": 0.2, "z": 0.6})
    model = build_model(bath, 1)
    u = evolve(qdd_schedule(1, 1), model, 0.3)
    ops = extract_channel_ops(u, 1)
    assert set(ops) == {"0", "x", "y", "z"}
    assert np.allclose(reconstruct_from_channels(ops), u, atol=1e-13)
    res = unitarity_residuals(ops)
    assert res["completeness"] < 1e-12
    for key in ("cross_x", "cross_y", "cross_z"):
        assert res[key] < 1e-12


def test_trace_distance_basics():
    rho = np.diag([0.5, 0.5]).astype(complex)
    assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-15)
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    assert trace_distance(p0, p1) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ValueError):
        trace_distance(p0, np.diag([0.7, 0.7]).astype(complex))  # trace != 1


def test_partial_trace_factorized():
    rng = np.random.default_rng(12)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho_s = a @ a.conj().T
    rho_s /= np.trace(rho_s).real
    b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho_b = b @ b.conj().T
    rho_b /= np.trace(rho_b).real
    joint = np.kron(rho_s, rho_b)
    assert np.allclose(partial_trace_bath(joint, 2, 4), rho_s, atol=1e-13)


def test_experiment_config_validation():
    bath = BathSpec(dim=4, seed=0, norms={"0": 1.0, "z": 0.5})
    with pytest.raises(ValueError):
        ExperimentConfig(kind="cdd", orders=(1, 1), bath=bath, T=0.1)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="qdd", orders=(1, 1, 1), bath=bath, T=0.1)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="qdd", orders=(1, 1), bath=bath, T=-0.1)
    no_j0 = BathSpec(dim=4, seed=0, norms={"z": 0.5})
    with pytest.raises(ValueError):
        ExperimentConfig(kind="qdd", orders=(1, 1), bath=no_j0, T=0.1)
    with pytest.raises(ValueError):
        ExperimentConfig(
            kind="qdd", orders=(1, 1), bath=bath, T=0.1, tie_order="sideways"
        )


def test_run_experiment_margins_and_determinism():
    bath = BathSpec(dim=8, seed=42, norms={"0": 1.0, "x": 0.3, "y": 0.8, "z": 0.05})
    cfg = ExperimentConfig(kind="qdd", orders=(2, 2), bath=bath, T=0.05)
    res = run_experiment(cfg)
    assert 0.0 <= res.distance_actual <= res.distance_bound
    assert res.margin > 0.0
    assert all(v > 0.0 for v in res.channel_margins.values())
    assert res.unitarity_residual < 1e-12
    res2 = run_experiment(cfg)
    assert res2.distance_actual == res.distance_actual
    assert res2.channel_norms == res.channel_norms


def test_run_experiment_eta_from_realized_norms():
    bath = BathSpec(dim=8, seed=1, norms={"0": 1.0, "x": 0.3, "y": 0.8, "z": 0.05})
    res = run_experiment(ExperimentConfig(kind="qdd", orders=(1, 1), bath=bath, T=0.1))
    assert res.epsilon == pytest.approx(0.1, rel=1e-12)
    assert res.eta[0] == pytest.approx(0.3, rel=1e-12)


def test_tie_order_does_not_change_norms():
    """Coincident-pulse ordering only shifts a global phase."""
    bath = BathSpec(dim=4, seed=6, norms={"0": 1.0, "x": 0.4, "y": 0.4, "z": 0.4})
    base = ExperimentConfig(kind="qdd", orders=(1, 1), bath=bath, T=0.2)
    flipped = ExperimentConfig(
        kind="qdd", orders=(1, 1), bath=bath, T=0.2, tie_order="outer-first"
    )
    r1, r2 = run_experiment(base), run_experiment(flipped)
    assert r1.distance_actual == pytest.approx(r2.distance_actual, abs=1e-13)
    for ch in ("x", "y", "z"):
        assert r1.channel_norms[ch] == pytest.approx(r2.channel_norms[ch], abs=1e-13)


def test_run_experiment_nudd():
    bath = BathSpec(
        dim=4, seed=11, norms={"00": 1.0, "x0": 0.2, "0z": 0.2, "yy": 0.1}
    )
    cfg = ExperimentConfig(kind="nudd", orders=(1, 1, 1, 1), bath=bath, T=0.05)
    res = run_experiment(cfg)
    assert res.kind == "nudd"
    assert res.margin > 0.0
    assert res.unitarity_residual < 1e-11
    assert "error_sum" in res.channel_margins


def test_initial_state_options():
    bath = BathSpec(dim=4, seed=13, norms={"0": 1.0, "z": 0.5})
    for state in ("random", "plus", "zero"):
        for bath_state in ("maximally-mixed", "pure-random"):
            cfg = ExperimentConfig(
                kind="qdd",
                orders=(1, 1),
                bath=bath,
                T=0.1,
                initial_state=state,
                bath_state=bath_state,
            )
            res = run_experiment(cfg)
            assert res.margin > -1e-12


def test_scalar_bath_sine_closed_form():
    """dim-1 bath, no pulses, |+> probe: distance is exactly |sin(b_z T)|."""
    bath = BathSpec(dim=1, seed=21, norms={"0": 1.0, "z": 0.8})
    model = build_model(bath, 1)
    bz = float(model.couplings["z"][0, 0].real)
    for T in (0.3, 1.0, 2.5):
        cfg = ExperimentConfig(
            kind="qdd", orders=(0, 0), bath=bath, T=T, initial_state="plus"
        )
        res = run_experiment(cfg)
        assert res.distance_actual == pytest.approx(abs(math.sin(bz * T)), abs=1e-12)


def test_commuting_dephasing_fully_refocused():
    """One outer level cancels a commuting dephasing coupling exactly."""
    bath = BathSpec(dim=1, seed=22, norms={"0": 1.0, "z": 0.8})
    for orders in ((0, 1), (0, 2), (2, 3)):
        cfg = ExperimentConfig(
            kind="qdd", orders=orders, bath=bath, T=0.9, initial_state="plus"
        )
        res = run_experiment(cfg)
        assert res.distance_actual <= 1e-12


def test_fit_scaling_orders_11():
    bath = BathSpec(dim=4, seed=31, norms={"0": 1.0, "x": 0.4, "y": 0.4, "z": 0.4})
    fit = fit_scaling(1, 1, bath)
    assert fit.slopes["x"] == pytest.approx(2.0, abs=0.1)
    assert fit.slopes["y"] == pytest.approx(3.0, abs=0.1)
    assert fit.slopes["z"] == pytest.approx(2.0, abs=0.1)


def test_fit_scaling_underflow_reports_none():
    # with no transverse couplings the x channel never rises above the floor
    bath = BathSpec(dim=4, seed=32, norms={"0": 1.0, "z": 0.3})
    fit = fit_scaling(2, 2, bath)
    assert fit.slopes["x"] is None


def test_result_jsonable():
    bath = BathSpec(dim=2, seed=41, norms={"0": 1.0, "x": 0.1})
    res = run_experiment(ExperimentConfig(kind="qdd", orders=(1, 1), bath=bath, T=0.1))
    doc = res.to_jsonable()
    assert doc["kind"] == "qdd"
    assert isinstance(doc["channel_norms"], dict)
    assert doc["margin"] == res.margin
