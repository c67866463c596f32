"""Physical parameters, input pulses and operators of the cavity Λ system.

Basis ordering on the truncated atom ⊗ field space is fixed as

    index = 3 * n + (level - 1)

with atomic level in {1, 2, 3} and photon number n in 0..n_fock, i.e. the
field is the slow index and the atom the fast one.  All rates follow the
"2Γ" master-equation convention: amplitudes decay at κ and Γ3, populations
at 2κ and 2Γ3.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import erf

from .errors import ParameterError

SINGLE_SIDED_RATIO = 1e-3


def kappa_from_mhz(kappa_mhz: float) -> float:
    """Angular cavity decay rate in rad/μs from κ/2π given in MHz."""
    return 2.0 * math.pi * kappa_mhz


@dataclass(frozen=True)
class SystemParams:
    """Rates and couplings of the atom-cavity system.

    Units are arbitrary but must be shared with the time axis used by the
    pulse engine (e.g. rad/μs with times in μs, or units of κ with times
    in 1/κ).
    """

    g: float
    kappa_A: float
    kappa_B: float = 0.0
    gamma_31: float = 0.0
    gamma_32: float = 0.0
    delta: float = 0.0
    omega_C: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        for name in ("g", "kappa_A", "kappa_B", "gamma_31", "gamma_32", "delta", "omega_C", "epsilon"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}", operation="SystemParams")
        for name in ("g", "kappa_B", "gamma_31", "gamma_32", "omega_C", "epsilon"):
            if getattr(self, name) < 0:
                raise ParameterError(
                    f"{name} must be >= 0, got {getattr(self, name)}",
                    operation="SystemParams",
                    context={"field": name},
                )
        if self.kappa_A <= 0:
            raise ParameterError(
                f"kappa_A must be > 0, got {self.kappa_A}",
                operation="SystemParams",
                context={"field": "kappa_A"},
            )

    @classmethod
    def in_kappa_units(cls, kappa=1.0, **multiples) -> "SystemParams":
        """Build from rates given as multiples of κ (with κ_B = 0 unless given).

        ``SystemParams.in_kappa_units(kappa_from_mhz(2.5), g=10, gamma_31=0.6,
        gamma_32=0.6)`` reproduces the Fig. 3 configuration in rad/μs.
        """
        kappa_B = multiples.pop("kappa_B", 0.0)
        scaled = {k: v * kappa for k, v in multiples.items()}
        return cls(kappa_A=kappa * (1.0 - kappa_B), kappa_B=kappa * kappa_B, **scaled)

    @property
    def kappa(self) -> float:
        return self.kappa_A + self.kappa_B

    @property
    def gamma_3(self) -> float:
        return self.gamma_31 + self.gamma_32

    @property
    def cooperativity(self) -> float:
        denom = 2.0 * self.kappa * self.gamma_3
        if denom == 0.0:
            raise ParameterError("cooperativity undefined when kappa * gamma_3 = 0", operation="cooperativity")
        return self.g**2 / denom

    @property
    def single_sided(self) -> bool:
        return self.kappa_B <= SINGLE_SIDED_RATIO * self.kappa_A

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def with_cooperativity(self, c: float) -> "SystemParams":
        """Same rates, with g rescaled so that the cooperativity equals ``c``."""
        if c < 0:
            raise ParameterError(f"cooperativity must be >= 0, got {c}", operation="with_cooperativity")
        return self.replace(g=math.sqrt(2.0 * self.kappa * self.gamma_3 * c))

    def scaled(self, factor: float) -> "SystemParams":
        """Multiply every rate by ``factor`` (a change of frequency unit)."""
        return SystemParams(**{f.name: getattr(self, f.name) * factor for f in dataclasses.fields(self)})

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class GaussianPulse:
    """Normalized Gaussian single-photon envelope ``C_n exp(-(t-t0)^2 / 2η^2)``."""

    t0: float
    eta: float

    def __post_init__(self):
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise ParameterError(f"pulse width eta must be > 0, got {self.eta}", operation="GaussianPulse")
        if not math.isfinite(self.t0):
            raise ParameterError(f"pulse center t0 must be finite, got {self.t0}", operation="GaussianPulse")

    @classmethod
    def from_fwhm(cls, t0: float, fwhm: float) -> "GaussianPulse":
        return cls(t0=t0, eta=fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0))))

    @property
    def amplitude_norm(self) -> float:
        return (math.sqrt(math.pi) * self.eta) ** -0.5

    @property
    def fwhm(self) -> float:
        return 2.0 * self.eta * math.sqrt(2.0 * math.log(2.0))

    @property
    def spectral_fwhm(self) -> float:
        """FWHM of the power spectrum |α(ω)|² in angular frequency."""
        return 2.0 * math.sqrt(math.log(2.0)) / self.eta

    def __call__(self, t):
        return pulse_value(self, t)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return -(t - self.t0) / self.eta**2 * pulse_value(self, t)

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        s = (t - self.t0) / self.eta
        return (s**2 - 1.0) / self.eta**2 * pulse_value(self, t)

    def energy_between(self, t_start, t_end):
        """Exact ∫|α_in|² dt over [t_start, t_end]."""
        a = (np.asarray(t_start, dtype=float) - self.t0) / self.eta
        b = (np.asarray(t_end, dtype=float) - self.t0) / self.eta
        return 0.5 * (erf(b) - erf(a))

    def default_window(self, kappa: float) -> tuple[float, float]:
        """[0, t0 + 6η + 10/κ], widened at the start if the pulse begins early."""
        start = min(0.0, self.t0 - 8.0 * self.eta)
        return start, self.t0 + 6.0 * self.eta + 10.0 / kappa


def pulse_value(pulse: GaussianPulse, t):
    t = np.asarray(t, dtype=float)
    out = pulse.amplitude_norm * np.exp(-0.5 * ((t - pulse.t0) / pulse.eta) ** 2)
    return out if out.ndim else float(out)


class HilbertSpace:
    """Truncated Fock space (0..n_fock photons) tensored with the 3-level atom."""

    def __init__(self, n_fock: int = 3):
        if int(n_fock) != n_fock or n_fock < 1:
            raise ParameterError(f"n_fock must be an integer >= 1, got {n_fock}", operation="HilbertSpace")
        self.n_fock = int(n_fock)
        self.dim = 3 * (self.n_fock + 1)

    def __repr__(self):
        return f"HilbertSpace(n_fock={self.n_fock})"

    def __eq__(self, other):
        return isinstance(other, HilbertSpace) and other.n_fock == self.n_fock

    def __hash__(self):
        return hash(("HilbertSpace", self.n_fock))

    def index(self, level: int, n: int) -> int:
        if level not in (1, 2, 3) or not 0 <= n <= self.n_fock:
            raise ParameterError(f"no basis state |{level},{n}> in {self!r}", operation="HilbertSpace.index")
        return 3 * n + (level - 1)

    def basis(self, level: int, n: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(level, n)] = 1.0
        return v

    @cached_property
    def _field_destroy(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.n_fock + 1, dtype=float)), k=1).astype(complex)

    @cached_property
    def destroy(self) -> np.ndarray:
        return np.kron(self._field_destroy, np.eye(3, dtype=complex))

    @cached_property
    def number(self) -> np.ndarray:
        return self.destroy.conj().T @ self.destroy

    def sigma(self, k: int, l: int) -> np.ndarray:
        """Atomic operator |k⟩⟨l| on the full space."""
        atom = np.zeros((3, 3), dtype=complex)
        atom[k - 1, l - 1] = 1.0
        return np.kron(np.eye(self.n_fock + 1, dtype=complex), atom)

    def level_indices(self, levels) -> np.ndarray:
        """Basis indices whose atomic level is in ``levels``."""
        return np.array([i for i in range(self.dim) if (i % 3) + 1 in set(levels)], dtype=int)


def build_hamiltonian(params: SystemParams, space: HilbertSpace) -> np.ndarray:
    """H = Δ(σ11 - a†a) + (ε a + g a σ31 + Ω_C σ32 + h.c.)."""
    if space.dim < 6:
        raise ParameterError("Hilbert space needs at least two Fock levels", operation="build_hamiltonian")
    a = space.destroy
    s31 = space.sigma(3, 1)
    s32 = space.sigma(3, 2)
    coupling = params.epsilon * a + params.g * a @ s31 + params.omega_C * s32
    h = params.delta * (space.sigma(1, 1) - space.number) + coupling + coupling.conj().T
    # symmetrize bitwise so H == H^† exactly
    return 0.5 * (h + h.conj().T)


def build_collapse_operators(params: SystemParams, space: HilbertSpace) -> list[np.ndarray]:
    """Jump operators for the dissipator Σ L ρ L† - ½{L†L, ρ}.

    Zero-rate channels are omitted, so an undamped system returns [].
    """
    ops = []
    for rate, op in (
        (params.kappa, space.destroy),
        (params.gamma_31, space.sigma(1, 3)),
        (params.gamma_32, space.sigma(2, 3)),
    ):
        if rate < 0:
            raise ParameterError(f"negative decay rate {rate}", operation="build_collapse_operators")
        if rate > 0:
            ops.append(math.sqrt(2.0 * rate) * op)
    return ops
