"""Steady state of the driven master equation and the reflected-field phase.

The Liouvillian acts on row-major vectorized density matrices,
vec(A ρ B) = (A ⊗ Bᵀ) vec(ρ).  The steady state is the null vector of the
Liouvillian, obtained by replacing one row of the linear system with the
trace-one condition.

Input/output convention: the coherent pump term ε(a + a†) corresponds to an
input amplitude a_in = -iε/√(2κ_A), so that a_out = √(2κ_A)⟨a⟩ - a_in is the
reflected field (an empty resonant cavity returns a_out = a_in).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SolverError, UndefinedPhaseError
from .model import HilbertSpace, SystemParams, build_collapse_operators, build_hamiltonian

COND_LIMIT = 1e13
PHASE_FLOOR = 1e-12


def wrap_phase(x):
    """Map angles to (-π, π]."""
    out = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi)
    return out if out.ndim else float(out)


def liouvillian(hamiltonian: np.ndarray, collapse_ops) -> np.ndarray:
    d = hamiltonian.shape[0]
    eye = np.eye(d, dtype=complex)
    lv = -1j * (np.kron(hamiltonian, eye) - np.kron(eye, hamiltonian.T))
    for op in collapse_ops:
        ldl = op.conj().T @ op
        lv += np.kron(op, op.conj()) - 0.5 * np.kron(ldl, eye) - 0.5 * np.kron(eye, ldl.T)
    return lv


def apply_liouvillian(params: SystemParams, space: HilbertSpace, rho: np.ndarray) -> np.ndarray:
    """dρ/dt evaluated directly in operator form (independent of the superoperator)."""
    h = build_hamiltonian(params, space)
    out = -1j * (h @ rho - rho @ h)
    for op in build_collapse_operators(params, space):
        ldl = op.conj().T @ op
        out += op @ rho @ op.conj().T - 0.5 * (ldl @ rho + rho @ ldl)
    return out


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    residual: float = 0.0
    folded_dark_level: bool = False

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.trace(op @ self.matrix))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def trace_error(self) -> float:
        return float(abs(np.trace(self.matrix) - 1.0))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))[0])

    def is_valid(self, herm_tol=1e-10, trace_tol=1e-10, pos_tol=1e-8) -> bool:
        return (
            self.hermiticity_error() <= herm_tol
            and self.trace_error() <= trace_tol
            and self.min_eigenvalue() >= -pos_tol
        )


def _effective_model(params: SystemParams, space: HilbertSpace, dark_level: str):
    """Decide whether level |2⟩ is dropped.

    With Ω_C = 0 nothing drives |2⟩, so any 3→2 decay traps the atom there and
    the probe sees an empty cavity.  The "fold" policy removes |2⟩ and sends
    the 3→2 channel to |1⟩, keeping the excited-state linewidth Γ3 (the
    two-level reduction of the Λ system).
    """
    if dark_level not in ("auto", "fold", "keep"):
        raise ParameterError(f"unknown dark_level policy {dark_level!r}", operation="solve_steady_state")
    fold = dark_level == "fold" or (dark_level == "auto" and params.omega_C == 0.0)
    if not fold:
        return params, None
    if params.omega_C != 0.0:
        raise ParameterError("cannot fold level |2> while omega_C != 0", operation="solve_steady_state")
    eff = params.replace(gamma_31=params.gamma_3, gamma_32=0.0)
    return eff, space.level_indices((1, 3))


def solve_steady_state(params: SystemParams, space: HilbertSpace | None = None, dark_level: str = "auto") -> DensityMatrix:
    space = space or HilbertSpace(3)
    if params.kappa <= 0 and params.gamma_3 <= 0:
        raise ParameterError("steady state needs kappa > 0 or gamma_3 > 0", operation="solve_steady_state")
    eff, keep = _effective_model(params, space, dark_level)
    h = build_hamiltonian(eff, space)
    ops = build_collapse_operators(eff, space)
    if keep is not None:
        h = h[np.ix_(keep, keep)]
        ops = [op[np.ix_(keep, keep)] for op in ops]
    d = h.shape[0]
    lv = liouvillian(h, ops)

    system = lv.copy()
    system[0, :] = 0.0
    system[0, np.arange(d) * (d + 1)] = 1.0
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    cond = np.linalg.cond(system)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SolverError(
            f"Liouvillian is singular or ill-conditioned (cond={cond:.3g}); steady state not unique",
            operation="solve_steady_state",
            context={"params": params.as_dict(), "n_fock": space.n_fock, "cond": float(cond)},
        )
    vec = np.linalg.solve(system, rhs)
    rho_small = vec.reshape(d, d)
    rho_small = 0.5 * (rho_small + rho_small.conj().T)
    rho_small /= np.trace(rho_small).real
    residual = float(np.max(np.abs(lv @ rho_small.reshape(-1))))

    if keep is None:
        rho = rho_small
    else:
        rho = np.zeros((space.dim, space.dim), dtype=complex)
        rho[np.ix_(keep, keep)] = rho_small
    return DensityMatrix(matrix=rho, residual=residual, folded_dark_level=keep is not None)


def input_amplitude(params: SystemParams) -> complex:
    """Coherent input amplitude ⟨a_in⟩ that produces the pump ε."""
    return -1j * params.epsilon / math.sqrt(2.0 * params.kappa_A)


@dataclass(frozen=True)
class SpectrumPoint:
    delta: float
    phase: float
    n_intra: float
    a_out_mean: complex
    a_mean: complex = 0j
    residual: float = 0.0


def output_field(rho: DensityMatrix, params: SystemParams, space: HilbertSpace | None = None) -> SpectrumPoint:
    """Reflected field ⟨a_out⟩ and its phase relative to the input field."""
    space = space or HilbertSpace(rho.dim // 3 - 1)
    a_mean = rho.expect(space.destroy)
    a_in = input_amplitude(params)
    a_out = math.sqrt(2.0 * params.kappa_A) * a_mean - a_in
    if abs(a_out) < PHASE_FLOOR or abs(a_in) < PHASE_FLOOR:
        raise UndefinedPhaseError(
            f"|<a_out>| = {abs(a_out):.3g}, |<a_in>| = {abs(a_in):.3g}: phase undefined",
            operation="output_field",
            module="steady-state-engine",
            context={"delta": params.delta},
        )
    phase = wrap_phase(np.angle(a_out) - np.angle(a_in))
    n_intra = float(rho.expect(space.number).real)
    return SpectrumPoint(
        delta=params.delta, phase=phase, n_intra=n_intra, a_out_mean=a_out, a_mean=a_mean, residual=rho.residual
    )


def spectrum_point(params: SystemParams, space: HilbertSpace | None = None, dark_level: str = "auto") -> SpectrumPoint:
    space = space or HilbertSpace(3)
    return output_field(solve_steady_state(params, space, dark_level), params, space)


def phase_spectrum(params, space=None, delta_grid=(), workers=1, dark_level="auto") -> list[SpectrumPoint]:
    """One SpectrumPoint per detuning; points are independent and may run in threads."""
    space = space or HilbertSpace(3)
    grid = np.asarray(delta_grid, dtype=float)
    if grid.size == 0:
        raise ParameterError("delta grid is empty", operation="phase_spectrum")
    if np.any(np.diff(grid) < 0):
        raise ParameterError("delta grid must be sorted", operation="phase_spectrum")

    def one(delta):
        p = params.replace(delta=float(delta))
        try:
            return spectrum_point(p, space, dark_level)
        except (SolverError, UndefinedPhaseError) as exc:
            exc.context["delta"] = float(delta)
            exc.operation = "phase_spectrum"
            raise

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, grid))
    return [one(d) for d in grid]


@dataclass(frozen=True)
class PairedSpectrum:
    delta: np.ndarray
    off: list
    on: list
    phase_diff: np.ndarray

    @property
    def max_residual(self) -> float:
        return max(p.residual for p in self.off + self.on)


def paired_spectrum(params, space=None, delta_grid=(), omega_on=None, workers=1) -> PairedSpectrum:
    """Φ(Δ) = φ(Ω_C = 0) - φ(Ω_C = omega_on) on one shared grid."""
    omega_on = params.omega_C if omega_on is None else omega_on
    if omega_on <= 0:
        raise ParameterError("paired mode needs a nonzero control field", operation="paired_spectrum")
    grid = np.asarray(delta_grid, dtype=float)
    off = phase_spectrum(params.replace(omega_C=0.0), space, grid, workers)
    on = phase_spectrum(params.replace(omega_C=omega_on), space, grid, workers)
    diff = wrap_phase(np.array([a.phase for a in off]) - np.array([b.phase for b in on]))
    return PairedSpectrum(delta=grid, off=off, on=on, phase_diff=np.atleast_1d(diff))


def normalized_photon_number(points) -> np.ndarray:
    n = np.array([p.n_intra for p in points])
    return n / n.max()


def unwrap_phase(phases, cut=np.pi):
    """Continuous phase along a grid plus the indices where a branch cut was crossed."""
    phases = np.asarray(phases, dtype=float)
    jumps = np.flatnonzero(np.abs(np.diff(phases)) > cut) + 1
    return np.unwrap(phases), jumps


def truncation_change(params: SystemParams, n_fock: int = 3) -> float:
    """Largest change of ⟨a⟩ and ⟨a†a⟩ when the Fock cutoff is raised by one."""
    lo = spectrum_point(params, HilbertSpace(n_fock))
    hi = spectrum_point(params, HilbertSpace(n_fock + 1))
    return max(abs(lo.a_mean - hi.a_mean), abs(lo.n_intra - hi.n_intra))


def local_maxima(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])
    return np.flatnonzero(inner) + 1
