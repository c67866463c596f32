import math

import numpy as np
import pytest
from scipy import integrate as sint

from cavity_eit_gate.errors import ParameterError
from cavity_eit_gate.model import (
    GaussianPulse,
    HilbertSpace,
    SystemParams,
    build_collapse_operators,
    build_hamiltonian,
    kappa_from_mhz,
)


def test_kappa_conversion():
    assert kappa_from_mhz(2.5) == pytest.approx(2 * math.pi * 2.5)


@pytest.mark.parametrize("field", ["g", "kappa_B", "gamma_31", "gamma_32", "omega_C", "epsilon"])
def test_negative_rates_rejected(field):
    with pytest.raises(ParameterError):
        SystemParams(**{"g": 1.0, "kappa_A": 1.0, field: -0.1})


def test_nonfinite_rejected():
    with pytest.raises(ParameterError):
        SystemParams(g=math.nan, kappa_A=1.0)


def test_cooperativity_definition():
    p = SystemParams(g=10.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6)
    assert p.gamma_3 == pytest.approx(1.2)
    assert p.cooperativity == pytest.approx(100.0 / (2 * 1.0 * 1.2))
    q = p.with_cooperativity(10.0)
    assert q.cooperativity == pytest.approx(10.0)
    assert q.gamma_3 == p.gamma_3


def test_cooperativity_undefined_without_loss():
    with pytest.raises(ParameterError):
        _ = SystemParams(g=1.0, kappa_A=1.0).cooperativity


def test_scaled_preserves_cooperativity():
    p = SystemParams(g=3.0, kappa_A=1.0, gamma_31=0.2, gamma_32=0.4, omega_C=1.5)
    q = p.scaled(15.7)
    assert q.cooperativity == pytest.approx(p.cooperativity)
    assert q.omega_C == pytest.approx(1.5 * 15.7)


class TestGaussianPulse:
    def test_normalized(self):
        p = GaussianPulse.from_fwhm(4.0, 1.0)
        val, _ = sint.quad(lambda t: p(t) ** 2, -10, 20, points=[4.0])
        assert val == pytest.approx(1.0, abs=1e-12)

    def test_fwhm_roundtrip(self):
        p = GaussianPulse.from_fwhm(0.0, 1.0)
        assert p.fwhm == pytest.approx(1.0)
        # the width is defined on the amplitude envelope
        assert p(0.5) / p(0.0) == pytest.approx(0.5)
        assert p.eta == pytest.approx(0.42466, abs=1e-5)
        assert p.amplitude_norm == pytest.approx((math.sqrt(math.pi) * 0.4246609001440095) ** -0.5, rel=1e-12)
        assert p.amplitude_norm == pytest.approx(1.15263, abs=1e-5)

    def test_energy_between_matches_quadrature(self):
        p = GaussianPulse(t0=1.0, eta=0.3)
        val, _ = sint.quad(lambda t: p(t) ** 2, 0.2, 1.4)
        assert p.energy_between(0.2, 1.4) == pytest.approx(val, rel=1e-12)

    def test_derivatives(self):
        p = GaussianPulse(t0=1.0, eta=0.3)
        t, h = 1.37, 1e-5
        assert p.derivative(t) == pytest.approx((p(t + h) - p(t - h)) / (2 * h), rel=1e-7)
        assert p.second_derivative(t) == pytest.approx((p.derivative(t + h) - p.derivative(t - h)) / (2 * h), rel=1e-6)

    def test_bad_width(self):
        with pytest.raises(ParameterError):
            GaussianPulse(t0=0.0, eta=0.0)


class TestHilbertSpace:
    def test_dimension_and_index(self):
        s = HilbertSpace(3)
        assert s.dim == 12
        assert s.index(1, 0) == 0
        assert s.index(3, 2) == 8

    def test_operators(self):
        s = HilbertSpace(4)
        a = s.destroy
        comm = a @ a.conj().T - a.conj().T @ a
        # [a, a†] = 1 except in the truncated top Fock level
        top = [s.index(k, 4) for k in (1, 2, 3)]
        keep = [i for i in range(s.dim) if i not in top]
        assert np.allclose(comm[np.ix_(keep, keep)], np.eye(len(keep)))
        assert np.allclose(s.number, a.conj().T @ a)
        proj = sum(s.sigma(k, k) for k in (1, 2, 3))
        assert np.allclose(proj, np.eye(s.dim))

    def test_rejects_bad_cutoff(self):
        with pytest.raises(ParameterError):
            HilbertSpace(0)


def test_hamiltonian_hermitian(fig2_params):
    h = build_hamiltonian(fig2_params.replace(delta=0.7), HilbertSpace(3))
    assert np.allclose(h, h.conj().T)


def test_single_excitation_spectrum():
    # oracle: dark-state eigenvalue 0 and bright pair ±sqrt(g² + Ω²)
    p = SystemParams(g=5.0, kappa_A=1.0, omega_C=3.0, epsilon=0.0)
    s = HilbertSpace(2)
    h = build_hamiltonian(p, s)
    idx = [s.index(1, 1), s.index(2, 0), s.index(3, 0)]
    block = h[np.ix_(idx, idx)]
    ev = np.sort(np.linalg.eigvalsh(block))
    root = math.sqrt(34.0)
    assert np.allclose(ev, [-root, 0.0, root], atol=1e-12)
    assert root == pytest.approx(5.831, abs=1e-3)
    # block is decoupled from the rest when ε = 0
    rest = [i for i in range(s.dim) if i not in idx]
    assert np.allclose(h[np.ix_(idx, rest)], 0.0)


def test_collapse_operators_omit_zero_rates():
    s = HilbertSpace(2)
    assert len(build_collapse_operators(SystemParams(g=1.0, kappa_A=1.0, gamma_31=0.5, gamma_32=0.2), s)) == 3
    assert len(build_collapse_operators(SystemParams(g=1.0, kappa_A=1.0, gamma_31=0.5), s)) == 2


def test_collapse_rates():
    # a single excitation in |3,0> decays at total rate 2Γ3
    p = SystemParams(g=1.0, kappa_A=1.0, gamma_31=0.25, gamma_32=0.5)
    s = HilbertSpace(1)
    psi = s.basis(3, 0)
    rate = sum(np.linalg.norm(op @ psi) ** 2 for op in build_collapse_operators(p, s))
    assert rate == pytest.approx(2 * p.gamma_3)


def test_truncation_nested(fig2_params):
    small, big = HilbertSpace(2), HilbertSpace(3)
    shared = list(range(small.dim))  # index 3n + level - 1 is cutoff independent
    p = fig2_params.replace(delta=0.3)
    assert np.array_equal(build_hamiltonian(p, big)[np.ix_(shared, shared)], build_hamiltonian(p, small))
    for a, b in zip(build_collapse_operators(p, small), build_collapse_operators(p, big)):
        assert np.array_equal(b[np.ix_(shared, shared)], a)
