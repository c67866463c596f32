import dataclasses
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from cavity_eit_gate.errors import ParameterError, UndefinedPhaseError
from cavity_eit_gate.gate import analytic_reflection, long_pulse, reflection_bruteforce
from cavity_eit_gate.model import GaussianPulse, SystemParams
from cavity_eit_gate.pulse import LEDGER_TOL, eit_window_check, extract_pulse_phase, integrate

PULSE = GaussianPulse.from_fwhm(4.0, 1.0)
LONG_C = (0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0)


@pytest.fixture(scope="module")
def fig3_runs():
    from cavity_eit_gate.model import kappa_from_mhz

    k = kappa_from_mhz(2.5)
    p = SystemParams(g=10.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6).scaled(k)
    return k, {om: integrate(p.replace(omega_C=om * k), om * k, PULSE) for om in (0.0, 2.0, 10.0)}


def test_reflection_without_control(fig3_runs):
    _, runs = fig3_runs
    r = runs[0.0]
    assert r.mode_overlap >= 0.98
    assert abs(abs(r.pulse_phase) - math.pi) <= 0.05
    # the finite-C reflection loses r² of the energy, r from the linear oracle
    c = 100.0 / 2.4
    assert r.n_out == pytest.approx(((1 - 2 * c) / (1 + 2 * c)) ** 2, abs=2e-3)


def test_transmission_with_strong_control(fig3_runs):
    _, runs = fig3_runs
    r = runs[10.0]
    assert r.n_out >= 0.95
    assert abs(r.pulse_phase) <= 0.05
    assert r.delay > 0


def test_narrow_window_distorts_pulse(fig3_runs):
    _, runs = fig3_runs
    r = runs[2.0]
    re = r.alpha_out.real[np.abs(r.alpha_out) > 1e-3 * np.abs(r.alpha_in).max()]
    # part of the pulse is reflected with the sign flipped, the delayed rest is not
    assert re.min() < 0 < re.max()
    assert r.mode_overlap < 0.9


def test_flux_ledger(fig3_runs):
    _, runs = fig3_runs
    for r in runs.values():
        assert r.input_energy == pytest.approx(1.0, abs=1e-6)
        assert abs(r.ledger_residual) <= LEDGER_TOL
        total = r.n_out + r.scattered + r.mirror_loss + r.final.excitation
        assert total == pytest.approx(r.input_energy, abs=1e-6)


def test_populations_sum_to_one(fig3_runs):
    _, runs = fig3_runs
    r = runs[10.0]
    assert np.all(r.p1 + r.p2 + r.p3 <= 1 + 1e-9)
    assert r.p1[0] == pytest.approx(1.0)


def test_eit_window(fig3_runs):
    k, _ = fig3_runs
    p = SystemParams(g=10.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6).scaled(k)
    assert eit_window_check(p.replace(omega_C=10 * k), PULSE).fits
    narrow = eit_window_check(p.replace(omega_C=2 * k), PULSE)
    assert not narrow.fits and narrow.ratio > 1


@pytest.mark.parametrize("scale", [1.0, 0.3 - 0.7j, 2.5j])
def test_linearity_under_input_scaling(scale):
    p = SystemParams(g=4.0, kappa_A=1.0, gamma_31=0.3, gamma_32=0.5, omega_C=2.0)
    pulse = GaussianPulse(t0=6.0, eta=1.5)
    ref = integrate(p, 2.0, pulse, analyze=False)
    run = integrate(p, 2.0, pulse, input_scale=scale, analyze=False)
    assert np.max(np.abs(run.alpha_out - scale * ref.alpha_out)) <= 1e-10 * max(1.0, abs(scale))
    assert run.n_out == pytest.approx(abs(scale) ** 2 * ref.n_out, rel=1e-9)


def test_empty_cavity_is_a_mirror():
    p = SystemParams(g=0.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6)
    r = integrate(p, 0.0, long_pulse(1.0))
    assert r.n_out == pytest.approx(1.0, abs=1e-6)
    assert abs(r.pulse_phase) <= 1e-3


def test_no_input_stays_in_ground_state():
    p = SystemParams(g=3.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6, omega_C=1.0)
    r = integrate(p, 1.0, None, window=(0.0, 10.0), analyze=False)
    assert np.max(np.abs(r.alpha_out)) == 0.0
    assert r.n_out == 0.0


def test_detuned_pulse_rejected():
    p = SystemParams(g=1.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6, delta=0.1)
    with pytest.raises(ParameterError):
        integrate(p, 0.0, PULSE)


def test_reflection_oracles_agree():
    for c in LONG_C:
        p = SystemParams(g=1.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6).with_cooperativity(c)
        assert reflection_bruteforce(p) == pytest.approx(analytic_reflection(p), abs=1e-12)


@pytest.mark.parametrize("c", LONG_C)
def test_long_pulse_matches_analytic_reflection(c):
    p = SystemParams(g=1.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6).with_cooperativity(c)
    pulse = long_pulse(1.0)
    r = integrate(p, 0.0, pulse)
    ref = analytic_reflection(p)
    assert abs(r.n_out - abs(ref) ** 2) <= 0.02
    i = int(np.argmin(np.abs(r.time_grid - pulse.t0)))
    ratio = r.alpha_out[i] / r.alpha_in[i]
    assert abs(ratio - ref) <= 0.02


def test_as_printed_variant_runs():
    p = SystemParams(g=4.0, kappa_A=1.0, gamma_31=0.3, gamma_32=0.5, omega_C=2.0)
    r = integrate(p, 2.0, GaussianPulse(t0=6.0, eta=1.5), variant="as-printed")
    assert r.variant == "as-printed"
    assert np.all(np.isfinite(r.alpha_out))
    with pytest.raises(ParameterError):
        integrate(p, 2.0, GaussianPulse(t0=6.0, eta=1.5), variant="nope")


def test_time_dependent_control_forms():
    p = SystemParams(g=4.0, kappa_A=1.0, gamma_31=0.3, gamma_32=0.5)
    pulse = GaussianPulse(t0=6.0, eta=1.5)
    t = np.linspace(0.0, 30.0, 301)
    table = integrate(p, (t, np.full_like(t, 2.0)), pulse, analyze=False)
    const = integrate(p, 2.0, pulse, analyze=False)
    func = integrate(p, lambda s: 2.0 + 0.0 * s, pulse, analyze=False)
    assert np.allclose(table.alpha_out, const.alpha_out, atol=1e-9)
    assert np.allclose(func.alpha_out, const.alpha_out, atol=1e-9)


_SCRIPT = """
import json, numpy as np
from cavity_eit_gate.model import GaussianPulse, SystemParams
from cavity_eit_gate.pulse import integrate
from cavity_eit_gate._accel import backend_name
p = SystemParams(g=4.0, kappa_A=1.0, gamma_31=0.3, gamma_32=0.5, omega_C=2.0)
r = integrate(p, 2.0, GaussianPulse(t0=4.0, eta=1.0), n_points=201, analyze=False)
print(json.dumps({"backend": backend_name(), "re": r.alpha_out.real.tolist(), "im": r.alpha_out.imag.tolist()}))
"""


def _run(disable):
    env = dict(os.environ)
    env["CAVITY_EIT_DISABLE_NUMBA"] = "1" if disable else "0"
    out = subprocess.run([sys.executable, "-c", _SCRIPT], env=env, check=True, capture_output=True, text=True)
    return json.loads(out.stdout)


@pytest.mark.slow
def test_numba_and_python_backends_agree():
    jit, plain = _run(False), _run(True)
    assert plain["backend"] == "python"
    a = np.array(jit["re"]) + 1j * np.array(jit["im"])
    b = np.array(plain["re"]) + 1j * np.array(plain["im"])
    assert np.max(np.abs(a - b)) <= 1e-12


def _synthetic(alpha_out_of_t):
    p = SystemParams(g=0.0, kappa_A=1.0)
    pulse = GaussianPulse(t0=10.0, eta=1.0)
    rec = integrate(p, 0.0, pulse, window=(0.0, 30.0), analyze=False)
    return dataclasses.replace(rec, alpha_out=alpha_out_of_t(rec.time_grid, pulse))


def test_phase_extraction_of_inverted_copy():
    rec = _synthetic(lambda t, p: -p(t).astype(complex))
    phase, delay, overlap = extract_pulse_phase(rec)
    assert abs(abs(phase) - math.pi) <= 1e-9
    assert abs(delay) <= 1e-6
    assert overlap == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("tau", [0.37, 1.5, 4.0])
def test_phase_extraction_of_pure_delay(tau):
    rec = _synthetic(lambda t, p: p(t - tau).astype(complex))
    phase, delay, overlap = extract_pulse_phase(rec)
    assert abs(phase) <= 1e-6
    assert delay == pytest.approx(tau, abs=1e-4)
    assert overlap == pytest.approx(1.0, abs=1e-6)


def test_phase_extraction_needs_output():
    rec = _synthetic(lambda t, p: np.zeros_like(t, dtype=complex))
    with pytest.raises(UndefinedPhaseError):
        extract_pulse_phase(rec)
