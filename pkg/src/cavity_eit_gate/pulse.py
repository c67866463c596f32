"""Single-photon pulse scattering from the atom-cavity system.

Integrates the amplitudes c10, c11, c20, c30 of |1,0⟩, |1,1⟩, |2,0⟩, |3,0⟩
driven by a Gaussian input α_in(t) and a (possibly time-dependent) control
Ω_C(t), with the reflected field α_out = √(2κ_A) c11 - α_in.

Two model variants are available:

``standard``
    ċ11 = -κ c11 - i g c30 + √(2κ_A) α_in
    ċ20 = -i Ω_C c30
    ċ30 = -Γ3 c30 - i g c11 - i Ω_C c20
    Spontaneous emission is tracked as a loss (2Γ3∫|c30|²), and the
    excitation ledger closes exactly.
``as-printed``
    The literal coefficient matrix including the Γ31 c30 feed into ċ10 and
    the +Γ32 c30 term in ċ20.  Kept for comparison; it does not conserve
    the ledger.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

from . import _kernels
from .errors import IntegrationError, ParameterError, UndefinedPhaseError
from .model import GaussianPulse, SystemParams
from .steady import local_maxima, phase_spectrum, wrap_phase

VARIANTS = {"standard": _kernels.STANDARD, "as-printed": _kernels.AS_PRINTED}

RTOL = 1e-9
ATOL = 1e-12
LEDGER_TOL = 1e-6
DEFAULT_POINTS = 4001


@dataclass(frozen=True)
class AmplitudeState:
    c10: complex = 1.0 + 0j
    c11: complex = 0j
    c20: complex = 0j
    c30: complex = 0j
    scattered_accum: float = 0.0
    emitted_accum: float = 0.0
    mirror_accum: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.c10, self.c11, self.c20, self.c30, self.emitted_accum, self.scattered_accum, self.mirror_accum],
            dtype=complex,
        )

    @classmethod
    def from_array(cls, y) -> "AmplitudeState":
        return cls(
            c10=complex(y[0]),
            c11=complex(y[1]),
            c20=complex(y[2]),
            c30=complex(y[3]),
            emitted_accum=float(y[4].real),
            scattered_accum=float(y[5].real),
            mirror_accum=float(y[6].real),
        )

    @property
    def excitation(self) -> float:
        return abs(self.c11) ** 2 + abs(self.c20) ** 2 + abs(self.c30) ** 2


@dataclass(frozen=True)
class ScatteringRecord:
    time_grid: np.ndarray
    alpha_in: np.ndarray
    alpha_out: np.ndarray
    amplitudes: np.ndarray  # (n_t, 4): c10, c11, c20, c30
    omega_c: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    n_out: float
    scattered: float
    mirror_loss: float
    input_energy: float
    ledger_residual: float
    variant: str
    steps: int
    final: AmplitudeState
    pulse_phase: float = math.nan
    delay: float = math.nan
    mode_overlap: float = math.nan
    params: SystemParams | None = field(default=None, repr=False)


def _control_table(omega_c, t_grid):
    """Normalize the control specification to a piecewise-linear table."""
    if omega_c is None:
        return np.zeros(1), np.zeros(1)
    if np.isscalar(omega_c):
        if omega_c < 0:
            raise ParameterError("omega_c must be >= 0", operation="integrate")
        return np.zeros(1), np.array([float(omega_c)])
    if hasattr(omega_c, "time_grid") and hasattr(omega_c, "omega_c"):
        return np.asarray(omega_c.time_grid, dtype=float), np.asarray(omega_c.omega_c, dtype=float)
    if isinstance(omega_c, tuple) and len(omega_c) == 2:
        return np.asarray(omega_c[0], dtype=float), np.asarray(omega_c[1], dtype=float)
    if callable(omega_c):
        # sampled 4x finer than the output grid; the kernel interpolates linearly
        fine = np.linspace(t_grid[0], t_grid[-1], 4 * (len(t_grid) - 1) + 1)
        return fine, np.asarray([float(omega_c(t)) for t in fine])
    raise ParameterError(f"cannot interpret control field {omega_c!r}", operation="integrate")


def integrate(
    params: SystemParams,
    omega_c=0.0,
    pulse: GaussianPulse | None = None,
    window=None,
    variant: str = "standard",
    *,
    input_scale: complex = 1.0,
    n_points: int = DEFAULT_POINTS,
    time_grid=None,
    rtol: float = RTOL,
    atol: float = ATOL,
    initial: AmplitudeState | None = None,
    max_steps: int = 5_000_000,
    analyze: bool = True,
) -> ScatteringRecord:
    """Scatter one input pulse (or none, if ``pulse`` is None) off the system.

    ``omega_c`` may be a constant, a ``(times, values)`` table, an object with
    ``time_grid``/``omega_c`` attributes, or a callable of time.
    """
    if params.delta != 0.0:
        raise ParameterError("pulse engine is restricted to resonant pulses (delta = 0)", operation="integrate")
    if variant not in VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}; use one of {sorted(VARIANTS)}", operation="integrate")

    if time_grid is not None:
        t_grid = np.asarray(time_grid, dtype=float)
    else:
        if window is None:
            if pulse is None:
                raise ParameterError("window is required when there is no input pulse", operation="integrate")
            window = pulse.default_window(params.kappa)
        t_grid = np.linspace(float(window[0]), float(window[1]), int(n_points))
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise ParameterError("time grid must be strictly increasing with >= 2 points", operation="integrate")

    if pulse is None:
        amp, t0, eta = 0j, 0.0, 1.0
    else:
        amp, t0, eta = complex(input_scale) * pulse.amplitude_norm, pulse.t0, pulse.eta
    om_t, om_v = _control_table(omega_c, t_grid)
    rates = np.array([params.kappa_A, params.kappa_B, params.g, params.gamma_31, params.gamma_32])
    y0 = (initial or AmplitudeState()).as_array()

    states, status, steps = _kernels.integrate_amplitudes(
        y0, t_grid, rates, om_t, om_v, amp, t0, eta, VARIANTS[variant], rtol, atol, max_steps
    )
    if status != _kernels.OK:
        reason = "step-size underflow" if status == _kernels.STEP_UNDERFLOW else "step budget exhausted"
        raise IntegrationError(f"integration failed: {reason}", operation="integrate", context={"steps": int(steps)})

    alpha_in = amp * np.exp(-0.5 * ((t_grid - t0) / eta) ** 2)
    c = states[:, :4]
    alpha_out = math.sqrt(2.0 * params.kappa_A) * c[:, 1] - alpha_in
    final = AmplitudeState.from_array(states[-1])
    p2 = np.abs(c[:, 2]) ** 2
    p3 = np.abs(c[:, 3]) ** 2
    if variant == "standard":
        # atom in |1>: everything not in |2>, |3> or lost to spontaneous emission
        p1 = 1.0 - p2 - p3 - states[:, 5].real
    else:
        p1 = np.abs(c[:, 0]) ** 2 + np.abs(c[:, 1]) ** 2

    input_energy = abs(input_scale) ** 2 * (pulse.energy_between(t_grid[0], t_grid[-1]) if pulse else 0.0)
    initial_exc = (initial or AmplitudeState()).excitation
    residual = (
        final.excitation
        + (final.emitted_accum - y0[4].real)
        + (final.scattered_accum - y0[5].real)
        + (final.mirror_accum - y0[6].real)
        - input_energy
        - initial_exc
    )
    if variant == "standard" and abs(residual) > 10 * LEDGER_TOL * max(1.0, input_energy + initial_exc):
        raise IntegrationError(
            f"flux ledger violated by {residual:.3g}", operation="integrate", context={"residual": float(residual)}
        )

    record = ScatteringRecord(
        time_grid=t_grid,
        alpha_in=alpha_in,
        alpha_out=alpha_out,
        amplitudes=c,
        omega_c=np.array([_kernels.control_at(t, om_t, om_v) for t in t_grid]),
        p1=p1,
        p2=p2,
        p3=p3,
        n_out=float(trapezoid(np.abs(alpha_out) ** 2, t_grid)),
        scattered=float(final.scattered_accum - y0[5].real),
        mirror_loss=float(final.mirror_accum - y0[6].real),
        input_energy=float(input_energy),
        ledger_residual=float(residual),
        variant=variant,
        steps=int(steps),
        final=final,
        params=params,
    )
    if analyze and record.n_out > 1e-6 and pulse is not None:
        phase, delay, overlap = extract_pulse_phase(record)
        record = _with(record, pulse_phase=phase, delay=delay, mode_overlap=overlap)
    return record


def _with(record, **changes):
    return dataclasses.replace(record, **changes)


def _parabolic_peak(y_m, y_0, y_p):
    denom = y_m - 2.0 * y_0 + y_p
    if denom == 0.0:
        return 0.0
    return 0.5 * (y_m - y_p) / denom


def _resample(t_src, values, t_new):
    """Cubic-spline resampling, zero outside the simulated window."""
    t_new = np.asarray(t_new, dtype=float)
    out = CubicSpline(t_src, values)(t_new)
    out[(t_new < t_src[0]) | (t_new > t_src[-1])] = 0.0
    return out


def extract_pulse_phase(record: ScatteringRecord, n_samples: int = 10_000):
    """Mode-matched phase, delay and shape overlap of the output pulse.

    The delay maximizes |∫α_in*(t) α_out(t + τ) dt| on a uniform lag grid of
    step (t_end - t_start)/n_samples, refined by a parabola through the peak.
    """
    t = record.time_grid
    n_out = float(trapezoid(np.abs(record.alpha_out) ** 2, t))
    if n_out <= 1e-6:
        raise UndefinedPhaseError(
            f"output energy {n_out:.3g} too small for a phase", operation="extract_pulse_phase", module="pulse-engine"
        )
    n_in = float(trapezoid(np.abs(record.alpha_in) ** 2, t))
    if n_in <= 0.0:
        raise UndefinedPhaseError("no input pulse", operation="extract_pulse_phase", module="pulse-engine")

    dt = (t[-1] - t[0]) / n_samples
    tu = t[0] + dt * np.arange(n_samples + 1)
    a_in = _resample(t, record.alpha_in, tu)
    a_out = _resample(t, record.alpha_out, tu)
    # corr[k] = Σ_t conj(a_in[t]) a_out[t + lag_k]
    spec_len = 2 * len(tu)
    corr = np.fft.ifft(np.fft.fft(a_out, spec_len) * np.conj(np.fft.fft(a_in, spec_len)))
    lags = np.concatenate([np.arange(0, len(tu)), np.arange(-len(tu), 0)])
    mag = np.abs(corr)
    k = int(np.argmax(mag))
    frac = 0.0
    if 0 < k < spec_len - 1 and abs(lags[k]) < len(tu) - 1:
        frac = _parabolic_peak(mag[k - 1], mag[k], mag[(k + 1) % spec_len])
    delay = (lags[k] + frac) * dt

    shifted_in = _resample(t, record.alpha_in, t - delay)
    overlap_amp = trapezoid(np.conj(shifted_in) * record.alpha_out, t)
    phase = wrap_phase(np.angle(overlap_amp))
    overlap = float(abs(overlap_amp) ** 2 / (n_out * n_in))
    return float(phase), float(delay), overlap


@dataclass(frozen=True)
class EITWindow:
    fits: bool
    ratio: float
    pulse_width: float
    window_width: float


def transparency_width(params: SystemParams, n_grid: int = 600, epsilon=None) -> float:
    """Full width of the central transparency feature of ⟨a†a⟩(Δ) at half depth.

    Half depth is measured between the Δ = 0 transparency peak and the
    deepest point before the first Autler-Townes peak.
    """
    if params.omega_C <= 0:
        raise ParameterError("transparency window needs omega_C > 0", operation="eit_window_check")
    eps = params.epsilon if (epsilon is None and params.epsilon > 0) else (epsilon or 1e-2 * params.kappa)
    p = params.replace(epsilon=eps, delta=0.0)
    outer = 1.5 * math.hypot(params.g, params.omega_C) + 2 * params.kappa
    inner = 1e-5 * params.kappa
    grid = np.concatenate([[0.0], np.geomspace(inner, outer, n_grid)])
    n = np.array([pt.n_intra for pt in phase_spectrum(p, None, grid)])
    peaks = local_maxima(n)
    if len(peaks) == 0 or n[0] < n[1]:
        raise ParameterError(
            "no transparency dip found (control field too weak for the linewidths)",
            operation="eit_window_check",
            module="pulse-engine",
        )
    first_peak = peaks[0]
    dip = int(np.argmin(n[: first_peak + 1]))
    if dip == 0 or n[dip] >= n[0]:
        raise ParameterError("no transparency dip found", operation="eit_window_check", module="pulse-engine")
    level = 0.5 * (n[0] + n[dip])
    k = int(np.flatnonzero(n[: dip + 1] <= level)[0])
    # linear interpolation between grid[k-1] (above level) and grid[k]
    x0, x1, y0, y1 = grid[k - 1], grid[k], n[k - 1], n[k]
    half = x0 + (level - y0) * (x1 - x0) / (y1 - y0)
    return 2.0 * half


def eit_window_check(params: SystemParams, pulse: GaussianPulse) -> EITWindow:
    width = transparency_width(params)
    pw = pulse.spectral_fwhm
    return EITWindow(fits=pw <= width, ratio=pw / width, pulse_width=pw, window_width=width)
