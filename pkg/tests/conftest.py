import math

import pytest

from cavity_eit_gate.model import SystemParams, kappa_from_mhz

KAPPA_MHZ = 2.5


@pytest.fixture
def fig2_params():
    """Classical-probe parameters in units of κ."""
    return SystemParams(g=5.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6, omega_C=3.0, epsilon=math.sqrt(1e-2))


@pytest.fixture
def kappa():
    return kappa_from_mhz(KAPPA_MHZ)


@pytest.fixture
def fig3_params(kappa):
    """Single-photon parameters in rad/μs."""
    return SystemParams(g=10.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6).scaled(kappa)
