import math

import numpy as np
import pytest

from cavity_eit_gate.errors import ParameterError
from cavity_eit_gate.gate import (
    DARK_REGION_LOSS,
    analytic_reflection,
    long_pulse,
    run_classical_gate,
    run_full_gate,
    run_target_scattering,
    sweep_cooperativity,
    target_pulse_for,
)
from cavity_eit_gate.model import GaussianPulse, SystemParams, kappa_from_mhz
from cavity_eit_gate.steady import wrap_phase

K = kappa_from_mhz(2.5)
CONTROL = GaussianPulse.from_fwhm(4.0, 1.0)
TARGET = target_pulse_for(CONTROL, 4.0)
BASE = SystemParams(g=10.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6).scaled(K)


@pytest.fixture(scope="module")
def gate100():
    return run_full_gate(BASE.with_cooperativity(100.0), CONTROL, TARGET)


def test_classical_truth_table(fig2_params):
    g = run_classical_gate(fig2_params)
    assert abs(wrap_phase(g.phase_off - math.pi)) <= 1e-3
    assert abs(g.phase_on) <= 1e-3
    assert abs(abs(g.phase_diff) - math.pi) <= 1e-3


def test_classical_gate_requires_weak_drive(fig2_params):
    with pytest.raises(ParameterError):
        run_classical_gate(fig2_params.replace(epsilon=0.5))


def test_full_gate_at_high_cooperativity(gate100):
    o = gate100
    assert abs(abs(o.conditional_shift) - math.pi) <= 0.05
    assert o.p_succ >= 0.85
    assert o.p_succ == o.p2 * o.p_target
    assert o.storage_valid


def test_energy_ledger_every_branch(gate100):
    for b in (gate100.branch_1, gate100.branch_2):
        assert abs(b.ledger) <= 1e-6
        assert b.n_out + b.scattered == pytest.approx(1.0, abs=1e-4)


def test_atom_in_two_is_transparent(gate100):
    b = gate100.branch_2
    assert b.n_out == pytest.approx(1.0, abs=1e-6)
    assert abs(b.phase) <= 1e-3
    assert b.scattered == 0.0


def test_target_requires_control_off():
    with pytest.raises(ParameterError):
        run_target_scattering(BASE.replace(omega_C=1.0), TARGET, 1)
    with pytest.raises(ParameterError):
        run_target_scattering(BASE, TARGET, 3)


def test_overlapping_target_rejected():
    with pytest.raises(ParameterError) as info:
        run_full_gate(BASE.with_cooperativity(100.0), CONTROL, target_pulse_for(CONTROL, 0.5))
    assert "turn_off_time" in info.value.context


def test_full_gate_needs_a_target():
    with pytest.raises(ParameterError):
        run_full_gate(BASE, CONTROL)


@pytest.fixture(scope="module")
def long_sweep():
    base = SystemParams(g=1.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6)
    pulse = long_pulse(1.0)
    target = GaussianPulse(t0=pulse.t0 + 4 * pulse.fwhm, eta=pulse.eta)
    return sweep_cooperativity(base, target, np.geomspace(0.2, 100.0, 40))


def test_zero_reflection_point(long_sweep):
    assert long_sweep.zero_reflection_c == pytest.approx(0.5, abs=0.05)


def test_dark_region_edge(long_sweep):
    assert long_sweep.dark_region_upper == pytest.approx(10.0, abs=2.0)


def test_sweep_oracle_equivalence(long_sweep):
    for o in long_sweep.outcomes:
        p = SystemParams(g=1.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6).with_cooperativity(o.cooperativity)
        assert abs(o.p_target - abs(analytic_reflection(p)) ** 2) <= 0.02


def test_sweep_shapes(long_sweep):
    c = long_sweep.c_grid
    p_succ = long_sweep.column("p_succ")
    assert np.all(p_succ[c <= 0.5] == 0.0)
    assert np.all(np.diff(p_succ[c >= 1.0]) > 0)
    loss = long_sweep.column("scattered")
    assert loss[np.argmin(np.abs(c - long_sweep.zero_reflection_c))] > 1 - 0.02
    assert np.all(loss[c > long_sweep.dark_region_upper] <= DARK_REGION_LOSS)
    shift = np.abs(long_sweep.column("conditional_shift"))
    assert np.allclose(shift[c >= 1.0], math.pi, atol=0.05)


def test_threaded_sweep_identical():
    grid = np.geomspace(0.2, 100.0, 12)
    a = sweep_cooperativity(BASE, TARGET, grid, target_delay=4.0)
    b = sweep_cooperativity(BASE, TARGET, grid, target_delay=4.0, workers=4)
    assert np.array_equal(a.column("p_succ"), b.column("p_succ"))
    assert a.dark_region_upper == b.dark_region_upper


def test_sweep_rejects_bad_grid():
    with pytest.raises(ParameterError):
        sweep_cooperativity(BASE, TARGET, [1.0])
    with pytest.raises(ParameterError):
        sweep_cooperativity(BASE, TARGET, [2.0, 1.0])
