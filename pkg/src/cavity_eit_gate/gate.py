"""Phase-gate scenarios built on the steady-state, pulse and storage engines.

(i)   classical probe, control field on/off          -> run_classical_gate
(ii)  single target photon, atom in |1⟩ or |2⟩        -> run_target_scattering
(iii) control photon stored, then target photon       -> run_full_gate

Truth table: control photon stored (atom in |2⟩) -> target transmitted with
phase 0; no control photon (atom in |1⟩) -> target reflected with phase π.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import CavityEITError, ParameterError, ProtocolInvalidError
from .model import GaussianPulse, HilbertSpace, SystemParams
from .pulse import ScatteringRecord, integrate
from .steady import spectrum_point, wrap_phase
from .storage import StorageResult, storage_efficiency

WEAK_DRIVE = 0.1
LONG_PULSE_FWHM = 20.0  # in units of 1/κ
DARK_REGION_LOSS = 0.2


class SweepError(CavityEITError):
    module = "gate-protocol"


def long_pulse(kappa: float, t0: float | None = None) -> GaussianPulse:
    """Quasi-monochromatic pulse with FWHM = 20/κ, centred 8η after t = 0 by default."""
    p = GaussianPulse.from_fwhm(0.0, LONG_PULSE_FWHM / kappa)
    return GaussianPulse(t0=8.0 * p.eta if t0 is None else t0, eta=p.eta)


def analytic_reflection(params: SystemParams) -> complex:
    """Resonant reflection coefficient (1 - 2C)/(1 + 2C) of the bare Λ atom (Ω_C = 0)."""
    _check_oracle_domain(params)
    if params.g == 0.0:
        return 1.0 + 0j
    c = params.cooperativity
    return complex((1.0 - 2.0 * c) / (1.0 + 2.0 * c))


def reflection_bruteforce(params: SystemParams) -> complex:
    """Same coefficient from a direct linear solve of the stationary amplitude equations."""
    _check_oracle_domain(params)
    m = np.array([[-params.kappa_A, -1j * params.g], [-1j * params.g, -params.gamma_3]], dtype=complex)
    c11, _ = np.linalg.solve(m, np.array([-math.sqrt(2.0 * params.kappa_A), 0.0], dtype=complex))
    return complex(math.sqrt(2.0 * params.kappa_A) * c11 - 1.0)


def _check_oracle_domain(params):
    if params.delta != 0.0 or params.omega_C != 0.0 or params.kappa_B != 0.0:
        raise ParameterError("reflection oracle needs delta = omega_C = kappa_B = 0", operation="analytic_reflection")


@dataclass(frozen=True)
class ClassicalGate:
    phase_off: float
    phase_on: float
    phase_diff: float
    residual: float


def run_classical_gate(params: SystemParams, space: HilbertSpace | None = None, omega_on: float | None = None):
    """Steady-state phases at Δ = 0 with the control field off and on."""
    if params.epsilon > WEAK_DRIVE * params.kappa * (1 + 1e-12):
        raise ParameterError(
            f"classical gate assumes weak drive epsilon <= {WEAK_DRIVE} kappa", operation="run_classical_gate"
        )
    omega_on = params.omega_C if omega_on is None else omega_on
    p = params.replace(delta=0.0)
    off = spectrum_point(p.replace(omega_C=0.0), space)
    on = spectrum_point(p.replace(omega_C=omega_on), space) if omega_on > 0 else off
    return ClassicalGate(
        phase_off=off.phase,
        phase_on=on.phase,
        phase_diff=wrap_phase(off.phase - on.phase),
        residual=max(off.residual, on.residual),
    )


@dataclass(frozen=True)
class TargetBranch:
    atom_state: int
    phase: float
    n_out: float
    scattered: float
    mode_overlap: float
    delay: float
    ledger: float  # n_out + scattered + leftover excitation - input energy
    record: ScatteringRecord = field(repr=False)


def run_target_scattering(
    params: SystemParams,
    pulse: GaussianPulse,
    atom_state: int,
    variant: str = "standard",
    window=None,
    n_points: int = 4001,
) -> TargetBranch:
    """Scatter the target photon with the control field off.

    With the atom in |2⟩ nothing couples to the cavity mode, which is
    simulated exactly as g = 0.
    """
    if params.omega_C != 0.0:
        raise ParameterError("target scattering requires the control field off", operation="run_target_scattering")
    if atom_state not in (1, 2):
        raise ParameterError(f"atom_state must be 1 or 2, got {atom_state}", operation="run_target_scattering")
    p = params if atom_state == 1 else params.replace(g=0.0)
    rec = integrate(p, 0.0, pulse, window, variant, n_points=n_points)
    leftover = rec.final.excitation
    return TargetBranch(
        atom_state=atom_state,
        phase=rec.pulse_phase,
        n_out=rec.n_out,
        scattered=rec.scattered,
        mode_overlap=rec.mode_overlap,
        delay=rec.delay,
        ledger=rec.n_out + rec.scattered + rec.mirror_loss + leftover - rec.input_energy,
        record=rec,
    )


@dataclass(frozen=True)
class GateOutcome:
    cooperativity: float
    phase_atom_in_1: float
    phase_atom_in_2: float
    conditional_shift: float
    p_target: float
    p2: float
    p_succ: float
    scattered: float
    n_out_atom_in_2: float
    ledger_atom_in_1: float
    ledger_atom_in_2: float
    storage_valid: bool = True
    storage: StorageResult | None = field(default=None, repr=False)
    branch_1: TargetBranch | None = field(default=None, repr=False)
    branch_2: TargetBranch | None = field(default=None, repr=False)


def _assemble(c, b1: TargetBranch, b2: TargetBranch, p2: float, storage=None, valid=True) -> GateOutcome:
    return GateOutcome(
        cooperativity=c,
        phase_atom_in_1=b1.phase,
        phase_atom_in_2=b2.phase,
        conditional_shift=wrap_phase(b1.phase - b2.phase),
        p_target=b1.n_out,
        p2=p2,
        p_succ=p2 * b1.n_out,
        scattered=b1.scattered,
        n_out_atom_in_2=b2.n_out,
        ledger_atom_in_1=b1.ledger,
        ledger_atom_in_2=b2.ledger,
        storage_valid=valid,
        storage=storage,
        branch_1=b1,
        branch_2=b2,
    )


def target_pulse_for(control_pulse: GaussianPulse, target_delay: float) -> GaussianPulse:
    return GaussianPulse(t0=control_pulse.t0 + target_delay, eta=control_pulse.eta)


def run_full_gate(
    params: SystemParams,
    control_pulse: GaussianPulse,
    target_pulse: GaussianPulse | None = None,
    target_delay: float | None = None,
    variant: str = "standard",
    n_points: int = 4001,
    atom2_branch: TargetBranch | None = None,
) -> GateOutcome:
    """Store the control photon, then scatter the target for both atomic states."""
    params = params.replace(omega_C=0.0)
    if target_pulse is None:
        if target_delay is None:
            raise ParameterError("give target_pulse or target_delay", operation="run_full_gate")
        target_pulse = target_pulse_for(control_pulse, target_delay)
    storage = storage_efficiency(params, control_pulse, variant=variant, n_points=n_points)
    off = storage.control.turn_off_time()
    if off > target_pulse.t0 - 3.0 * target_pulse.eta:
        raise ParameterError(
            f"control field still on at t = {off:.4g}, overlapping the target pulse",
            operation="run_full_gate",
            module="gate-protocol",
            context={"turn_off_time": off, "target_t0": target_pulse.t0},
        )
    b1 = run_target_scattering(params, target_pulse, 1, variant, n_points=n_points)
    b2 = atom2_branch or run_target_scattering(params, target_pulse, 2, variant, n_points=n_points)
    return _assemble(params.cooperativity, b1, b2, storage.p2, storage)


@dataclass(frozen=True)
class CooperativitySweep:
    c_grid: np.ndarray
    outcomes: list
    dark_region_upper: float
    zero_reflection_c: float

    def column(self, name) -> np.ndarray:
        return np.array([getattr(o, name) for o in self.outcomes], dtype=float)


def _target_only(params, pulse, variant, n_points, atom2, p2=math.nan, valid=False):
    b1 = run_target_scattering(params, pulse, 1, variant, n_points=n_points)
    return _assemble(params.cooperativity, b1, atom2, p2, None, valid)


def sweep_cooperativity(
    base: SystemParams,
    pulse: GaussianPulse,
    c_grid,
    target_delay: float | None = None,
    with_storage: bool = True,
    variant: str = "standard",
    workers: int = 1,
    n_points: int = 4001,
) -> CooperativitySweep:
    """Gate figures of merit versus cooperativity, varied through g.

    ``pulse`` is the target photon; when ``with_storage`` is set it is also
    used as the control photon, ``target_delay`` (default 4 FWHM) earlier.
    Points with C <= 1/2 cannot store and get p2 = 0.
    """
    grid = np.asarray(c_grid, dtype=float)
    if grid.size < 2 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ParameterError("c_grid must be positive, increasing, >= 2 points", operation="sweep_cooperativity")
    base = base.replace(omega_C=0.0)
    target_delay = 4.0 * pulse.fwhm if target_delay is None else target_delay
    control = GaussianPulse(t0=pulse.t0 - target_delay, eta=pulse.eta)
    atom2 = run_target_scattering(base, pulse, 2, variant, n_points=n_points)

    def one(c):
        p = base.with_cooperativity(float(c))
        if not with_storage:
            return _target_only(p, pulse, variant, n_points, atom2)
        if c <= 0.5:
            return _target_only(p, pulse, variant, n_points, atom2, p2=0.0)
        try:
            return run_full_gate(p, control, pulse, variant=variant, n_points=n_points, atom2_branch=atom2)
        except ProtocolInvalidError:
            return _target_only(p, pulse, variant, n_points, atom2, p2=0.0)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, grid))
    else:
        outcomes = [one(c) for c in grid]

    def n_out(c):
        return run_target_scattering(base.with_cooperativity(c), pulse, 1, variant, n_points=n_points).n_out

    def scattered(c):
        return run_target_scattering(base.with_cooperativity(c), pulse, 1, variant, n_points=n_points).scattered

    p_target = np.array([o.p_target for o in outcomes])
    k = int(np.argmin(p_target))
    if k == 0 or k == len(grid) - 1:
        raise SweepError(
            "grid too coarse to bracket the reflection minimum", operation="sweep_cooperativity",
            context={"argmin_c": float(grid[k])},
        )
    res = optimize.minimize_scalar(
        n_out, bracket=(grid[k - 1], grid[k], grid[k + 1]), method="golden", options={"xtol": 1e-6}
    )
    zero_c = float(res.x)

    loss = np.array([o.scattered for o in outcomes])
    above = np.flatnonzero((grid > zero_c) & (loss <= DARK_REGION_LOSS))
    if len(above) == 0:
        raise SweepError("grid never leaves the dark region", operation="sweep_cooperativity")
    i = int(above[0])
    lo = max(zero_c, grid[i - 1]) if i > 0 else zero_c
    if scattered(lo) <= DARK_REGION_LOSS:
        raise SweepError("grid too coarse to bracket the dark-region edge", operation="sweep_cooperativity")
    upper = float(optimize.bisect(lambda c: scattered(c) - DARK_REGION_LOSS, lo, grid[i], xtol=1e-6))
    return CooperativitySweep(c_grid=grid, outcomes=outcomes, dark_region_upper=upper, zero_reflection_c=zero_c)
