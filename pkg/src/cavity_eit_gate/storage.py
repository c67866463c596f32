"""Impedance-matched storage of a single Gaussian photon into |2,0⟩.

The control field is obtained by inverting the amplitude equations under
the condition α_out = 0:

1. c11 = α_in / √(2κ_A)
2. c30 = i (ċ11 - (κ_A - κ_B) c11) / g
3. |c20|² from d|c20|²/dt = -d|c30|²/dt - 2Γ3|c30|² + 2g Im(c30* c11)
4. Ω_C = |ċ30 + Γ3 c30 + i g c11| / |c20|

with ċ11, c̈11 taken analytically from the Gaussian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import InfeasiblePulseError, ProtocolInvalidError
from .model import GaussianPulse, SystemParams
from .pulse import ScatteringRecord, integrate

OMEGA_MAX = 20.0  # in units of κ
C20_FLOOR = 1e-9
FEASIBILITY_TOL = 1e-9
SYNTHESIS_POINTS = 20001


@dataclass(frozen=True)
class ControlPulse:
    time_grid: np.ndarray
    omega_c: np.ndarray
    omega_max: float
    valid_from: float
    c11: np.ndarray
    c30: np.ndarray
    c20_sq: np.ndarray
    clamped: np.ndarray

    def __call__(self, t):
        return np.interp(t, self.time_grid, self.omega_c)

    def turn_off_time(self, fraction: float = 1e-3) -> float:
        """Time after which Ω_C stays below fraction·omega_max."""
        above = np.flatnonzero(self.omega_c >= fraction * self.omega_max)
        if len(above) == 0:
            return float(self.time_grid[0])
        last = above[-1]
        if last + 1 >= len(self.time_grid):
            return math.inf
        return float(self.time_grid[last + 1])


@dataclass(frozen=True)
class StorageResult:
    p1: float
    p2: float
    leak: float
    scattered: float
    residual_excitation: float
    bookkeeping_error: float
    control: ControlPulse | None = None
    record: ScatteringRecord | None = None


def dark_state_angle(omega_c, g):
    """θ with tan θ = Ω_C / g."""
    return np.arctan2(omega_c, g)


def dark_state(omega_c, g):
    """(|1,1⟩, |2,0⟩) components of the dark state."""
    theta = dark_state_angle(omega_c, g)
    return -np.sin(theta), np.cos(theta)


def check_protocol(params: SystemParams):
    c = params.cooperativity
    if c <= 0.5:
        raise ProtocolInvalidError(
            f"impedance-matched storage is undefined for C = {c:.4g} <= 1/2",
            operation="synthesize_control",
            context={"cooperativity": c},
        )


def synthesize_control(
    params: SystemParams,
    pulse: GaussianPulse,
    window=None,
    omega_max: float | None = None,
    floor: float = C20_FLOOR,
    n_points: int = SYNTHESIS_POINTS,
) -> ControlPulse:
    check_protocol(params)
    if params.g <= 0:
        raise ProtocolInvalidError("storage needs g > 0", operation="synthesize_control")
    omega_max = OMEGA_MAX * params.kappa if omega_max is None else omega_max
    window = window or pulse.default_window(params.kappa)
    t = np.linspace(window[0], window[1], n_points)
    g, g3 = params.g, params.gamma_3
    k_eff = params.kappa_A - params.kappa_B
    sq = math.sqrt(2.0 * params.kappa_A)

    c11 = pulse(t) / sq
    dc11 = pulse.derivative(t) / sq
    ddc11 = pulse.second_derivative(t) / sq
    c30 = 1j * (dc11 - k_eff * c11) / g
    dc30 = 1j * (ddc11 - k_eff * dc11) / g

    c30_sq = np.abs(c30) ** 2
    source = 2.0 * g * np.imag(np.conj(c30) * c11) - 2.0 * g3 * c30_sq
    c20_sq = cumulative_simpson(source, x=t, initial=0.0) - (c30_sq - c30_sq[0])

    bad = c20_sq < -FEASIBILITY_TOL
    if np.any(bad):
        t_bad = float(t[np.argmax(bad)])
        raise InfeasiblePulseError(
            f"|c20|^2 turns negative at t = {t_bad:.4g}: pulse too fast for the cavity",
            operation="synthesize_control",
            context={"t": t_bad},
        )

    numerator = np.abs(dc30 + g3 * c30 + 1j * g * c11)
    omega = np.full_like(t, omega_max)
    started = c20_sq > floor
    if not np.any(started):
        raise InfeasiblePulseError("|c20|^2 never exceeds the floor", operation="synthesize_control")
    first = int(np.argmax(started))
    valid = np.arange(len(t)) >= first
    omega[valid] = numerator[valid] / np.sqrt(c20_sq[valid])
    clamped = ~valid | (omega > omega_max)
    omega = np.minimum(omega, omega_max)
    return ControlPulse(
        time_grid=t,
        omega_c=omega,
        omega_max=float(omega_max),
        valid_from=float(t[first]),
        c11=c11,
        c30=c30,
        c20_sq=np.maximum(c20_sq, 0.0),
        clamped=clamped,
    )


def storage_efficiency(
    params: SystemParams,
    pulse: GaussianPulse,
    control=None,
    window=None,
    variant: str = "standard",
    n_points: int = 4001,
) -> StorageResult:
    """Closed-loop storage: P2 = |c20|² after the pulse, P1 = 1 - P2 - scattered.

    ``control`` overrides the synthesized pulse (any form accepted by
    ``pulse.integrate``); by default it is synthesized from the input.
    """
    window = window or pulse.default_window(params.kappa)
    if control is None:
        control = synthesize_control(params, pulse, window)
    rec = integrate(params.replace(omega_C=0.0), control, pulse, window, variant, n_points=n_points, analyze=False)
    p2 = float(abs(rec.final.c20) ** 2)
    residual_exc = float(abs(rec.final.c11) ** 2 + abs(rec.final.c30) ** 2)
    book = p2 + rec.n_out + rec.scattered + rec.mirror_loss + residual_exc - rec.input_energy
    return StorageResult(
        p1=1.0 - p2 - rec.scattered,
        p2=p2,
        leak=rec.n_out,
        scattered=rec.scattered,
        residual_excitation=residual_exc,
        bookkeeping_error=float(book),
        control=control if isinstance(control, ControlPulse) else None,
        record=rec,
    )


def dark_state_fidelity(record: ScatteringRecord, control, params: SystemParams, norm_floor: float = 1e-6):
    """Time-averaged |⟨dark|ψ⟩|² over the (c11, c20) excitation amplitudes.

    Returns (average, instantaneous series); instants whose excitation norm is
    below ``norm_floor`` are excluded and reported as NaN.
    """
    t = record.time_grid
    if callable(control):
        omega = np.asarray(control(t), dtype=float)
    else:
        omega = np.broadcast_to(float(control), t.shape)
    s, c = dark_state(omega, params.g)
    c11 = record.amplitudes[:, 1]
    c20 = record.amplitudes[:, 2]
    norm = np.abs(c11) ** 2 + np.abs(c20) ** 2
    mask = norm > norm_floor
    fid = np.full(t.shape, np.nan)
    fid[mask] = np.abs(s[mask] * c11[mask] + c[mask] * c20[mask]) ** 2 / norm[mask]
    if not np.any(mask):
        return math.nan, fid
    return float(np.mean(fid[mask])), fid
