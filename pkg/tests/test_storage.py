import math

import numpy as np
import pytest

from cavity_eit_gate.errors import ProtocolInvalidError
from cavity_eit_gate.gate import long_pulse
from cavity_eit_gate.model import GaussianPulse, SystemParams, kappa_from_mhz
from cavity_eit_gate.storage import (
    OMEGA_MAX,
    check_protocol,
    dark_state,
    dark_state_angle,
    dark_state_fidelity,
    storage_efficiency,
    synthesize_control,
)

K = kappa_from_mhz(2.5)
PULSE = GaussianPulse.from_fwhm(4.0, 1.0)
BASE = SystemParams(g=10.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6).scaled(K)
LOG_C = np.geomspace(1.0, 100.0, 9)


@pytest.fixture(scope="module")
def sweep():
    return {c: storage_efficiency(BASE.with_cooperativity(c), PULSE) for c in LOG_C}


def test_dark_state_geometry():
    assert dark_state_angle(0.0, 1.0) == 0.0
    assert dark_state_angle(1.0, 1.0) == pytest.approx(math.pi / 4)
    v = dark_state(3.0, 4.0)
    assert np.linalg.norm(v) == pytest.approx(1.0)


@pytest.mark.parametrize("c", [0.1, 0.5])
def test_protocol_rejects_low_cooperativity(c):
    p = BASE.with_cooperativity(c)
    with pytest.raises(ProtocolInvalidError):
        check_protocol(p)
    with pytest.raises(ProtocolInvalidError):
        synthesize_control(p, PULSE)


def test_no_leak_above_c10(sweep):
    for c, r in sweep.items():
        if c >= 10:
            assert r.leak <= 1e-2


def test_p2_monotone_and_high(sweep):
    p2 = np.array([sweep[c].p2 for c in LOG_C])
    assert np.all(np.diff(p2) >= 0)
    assert p2[-1] >= 0.9


def test_bookkeeping(sweep):
    for r in sweep.values():
        assert abs(r.bookkeeping_error) <= 1e-9
        assert r.p1 + r.p2 + r.scattered == pytest.approx(1.0, abs=1e-9)
        assert abs(r.record.ledger_residual) <= 1e-6


@pytest.mark.parametrize("c", [1.0, 2.0, 10.0, 100.0])
def test_adiabatic_scattering_oracle(c):
    # zero reflection forces |c30|² = κ|α_in|²/2g², so scattered -> 1/(2C)
    r = storage_efficiency(SystemParams(g=1.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6).with_cooperativity(c), long_pulse(1.0))
    assert abs(2 * c * r.scattered - 1.0) <= 0.02
    assert r.p2 == pytest.approx(1 - 1 / (2 * c), abs=0.01 / c)


def test_control_turns_off_monotonically():
    ctl = synthesize_control(BASE, PULSE)
    om = ctl.omega_c
    assert om.max() <= OMEGA_MAX * K * (1 + 1e-12)
    assert np.all(np.diff(om[np.argmax(om):]) <= 1e-12 * om.max())
    assert om[-1] < 1e-3 * om.max()
    assert ctl.valid_from < PULSE.t0 < ctl.turn_off_time() < PULSE.t0 + 4.0


def test_dark_state_followed_at_high_c():
    p = BASE.with_cooperativity(100.0)
    r = storage_efficiency(p, PULSE)
    fid, series = dark_state_fidelity(r.record, r.control, p)
    assert fid >= 0.99
    assert np.all((series[np.isfinite(series)] <= 1 + 1e-9))


def test_explicit_control_reused():
    p = BASE.with_cooperativity(20.0)
    ctl = synthesize_control(p, PULSE)
    a = storage_efficiency(p, PULSE, control=ctl)
    b = storage_efficiency(p, PULSE)
    assert a.p2 == b.p2


def test_constant_control_is_worse(sweep):
    # a mismatched control field lets light leak back out
    p = BASE.with_cooperativity(100.0)
    r = storage_efficiency(p, PULSE, control=2.0 * K)
    assert r.leak > 0.1
    assert r.p2 < sweep[LOG_C[-1]].p2
