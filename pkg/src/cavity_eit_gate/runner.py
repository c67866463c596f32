"""Scenario execution: turn a RunConfig into result files and a summary."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import backend_name
from .config import RunConfig
from .gate import run_classical_gate, run_full_gate, sweep_cooperativity, target_pulse_for
from .model import HilbertSpace
from .output import (
    CONTROL_COLUMNS,
    GATE_SWEEP_COLUMNS,
    PULSE_COLUMNS,
    SPECTRUM_COLUMNS,
    pulse_rows,
    spectrum_rows,
    write_csv,
    write_gnuplot,
    write_json,
)
from .pulse import eit_window_check, integrate
from .steady import local_maxima, paired_spectrum, truncation_change, unwrap_phase
from .storage import dark_state_fidelity, storage_efficiency, synthesize_control

TOOL = "cavity-eit-gate"


def _summary(cfg: RunConfig, results: dict, diagnostics: dict) -> dict:
    return {
        "tool": TOOL,
        "version": __version__,
        "backend": backend_name(),
        "scenario": cfg.scenario,
        "config": cfg.to_dict(),
        "results": results,
        "diagnostics": diagnostics,
    }


def run_spectrum(cfg: RunConfig, out: Path, prefix: str = "") -> dict:
    pk = cfg.params_in_kappa_units()
    space = HilbertSpace(cfg.n_fock)
    grid = cfg.grid.values()
    paired = paired_spectrum(pk, space, grid, omega_on=pk.omega_C, workers=cfg.workers)
    write_csv(out / f"{prefix}spectrum_off.csv", SPECTRUM_COLUMNS, spectrum_rows(paired.off))
    write_csv(out / f"{prefix}spectrum_on.csv", SPECTRUM_COLUMNS, spectrum_rows(paired.on))
    write_csv(
        out / f"{prefix}phase_diff.csv", ("delta_over_kappa", "phase_diff_over_pi"), zip(grid, paired.phase_diff / np.pi)
    )
    write_gnuplot(
        out / f"{prefix}spectrum_phase.gp",
        "Reflected probe phase",
        "Delta/kappa",
        "phase/pi",
        [
            (f"{prefix}spectrum_off.csv", 1, 2, "Omega_C = 0"),
            (f"{prefix}spectrum_on.csv", 1, 2, f"Omega_C = {pk.omega_C:g} kappa"),
        ],
    )
    write_gnuplot(
        out / f"{prefix}spectrum_photons.gp",
        "Phase shift and normalized intracavity photon number",
        "Delta/kappa",
        "",
        [
            (f"{prefix}phase_diff.csv", 1, 2, "Phi/pi"),
            (f"{prefix}spectrum_on.csv", 1, 3, "<a+a>_N, control on"),
            (f"{prefix}spectrum_off.csv", 1, 3, "<a+a>_N, control off"),
        ],
    )
    gate = run_classical_gate(pk, space)
    n_off = np.array([p.n_intra for p in paired.off])
    peaks = grid[local_maxima(n_off)]
    _, cuts = unwrap_phase([p.phase for p in paired.off])
    trunc = max(truncation_change(pk.replace(delta=0.0), cfg.n_fock), truncation_change(pk.replace(delta=0.0, omega_C=0.0), cfg.n_fock))
    return {
        "results": {
            "phi_off_at_zero": gate.phase_off,
            "phi_on_at_zero": gate.phase_on,
            "phi_diff_at_zero": gate.phase_diff,
            "normal_mode_peaks_over_kappa": peaks,
            "branch_cuts_off_over_kappa": grid[cuts],
        },
        "diagnostics": {
            "liouvillian_residual": max(paired.max_residual, gate.residual),
            "truncation_change": trunc,
        },
    }


def _pulse_outputs(rec):
    return {
        "n_out": rec.n_out,
        "scattered": rec.scattered,
        "pulse_phase": rec.pulse_phase,
        "delay_us": rec.delay,
        "mode_overlap": rec.mode_overlap,
    }


def run_pulse(cfg: RunConfig, out: Path, prefix: str = "", omega_over_kappa=None) -> dict:
    params = cfg.params
    pulse = cfg.gaussian_pulse()
    omega = (cfg.system.get("omega_c_over_kappa", 0.0) if omega_over_kappa is None else omega_over_kappa) * cfg.kappa
    rec = integrate(params.replace(omega_C=omega), omega, pulse, variant=cfg.variant)
    name = f"{prefix}pulse.csv"
    write_csv(out / name, PULSE_COLUMNS, pulse_rows(rec, cfg.kappa))
    write_gnuplot(
        out / f"{prefix}pulse.gp",
        "Input and output pulse amplitudes",
        "t (us)",
        "amplitude (us^-1/2)",
        [(name, 1, 2, "alpha_in"), (name, 1, 3, "Re alpha_out")],
    )
    results = _pulse_outputs(rec)
    results["omega_c_over_kappa"] = omega / cfg.kappa
    if omega > 0:
        try:
            w = eit_window_check(params.replace(omega_C=omega), pulse)
            results["eit_window"] = {
                "fits": w.fits,
                "ratio": w.ratio,
                "pulse_width_rad_per_us": w.pulse_width,
                "window_width_rad_per_us": w.window_width,
            }
        except ValueError as exc:
            results["eit_window"] = {"error": str(exc)}
    return {"results": results, "diagnostics": {"flux_ledger_residual": rec.ledger_residual, "steps": rec.steps}}


def _write_control(out, name, control, kappa):
    write_csv(out / name, CONTROL_COLUMNS, zip(control.time_grid, control.omega_c / kappa))


def run_store(cfg: RunConfig, out: Path, prefix: str = "") -> dict:
    params = cfg.params.replace(omega_C=0.0)
    pulse = cfg.gaussian_pulse()
    control = synthesize_control(params, pulse)
    res = storage_efficiency(params, pulse, control, variant=cfg.variant)
    fid, _ = dark_state_fidelity(res.record, control, params)
    _write_control(out, f"{prefix}control.csv", control, cfg.kappa)
    write_csv(out / f"{prefix}storage_trace.csv", PULSE_COLUMNS, pulse_rows(res.record, cfg.kappa))
    write_gnuplot(
        out / f"{prefix}control.gp",
        "Impedance-matched control field",
        "t (us)",
        "Omega_C/kappa",
        [(f"{prefix}control.csv", 1, 2, "Omega_C")],
    )
    return {
        "results": {
            "cooperativity": params.cooperativity,
            "p1": res.p1,
            "p2": res.p2,
            "leak": res.leak,
            "scattered": res.scattered,
            "dark_state_fidelity": fid,
            "valid_from_us": control.valid_from,
            "turn_off_us": control.turn_off_time(),
        },
        "diagnostics": {
            "flux_ledger_residual": res.record.ledger_residual,
            "storage_bookkeeping": res.bookkeeping_error,
        },
    }


def _gate_dict(o):
    return {
        "cooperativity": o.cooperativity,
        "phase_atom_in_1": o.phase_atom_in_1,
        "phase_atom_in_2": o.phase_atom_in_2,
        "conditional_shift": o.conditional_shift,
        "p_target": o.p_target,
        "p2": o.p2,
        "p_succ": o.p_succ,
        "scattered": o.scattered,
        "n_out_atom_in_2": o.n_out_atom_in_2,
    }


def run_gate(cfg: RunConfig, out: Path, prefix: str = "") -> dict:
    params = cfg.params.replace(omega_C=0.0)
    control = cfg.gaussian_pulse()
    target = target_pulse_for(control, cfg.target_delay_us)
    o = run_full_gate(params, control, target, variant=cfg.variant)
    _write_control(out, f"{prefix}control.csv", o.storage.control, cfg.kappa)
    write_csv(out / f"{prefix}target_atom1.csv", PULSE_COLUMNS, pulse_rows(o.branch_1.record, cfg.kappa))
    write_csv(out / f"{prefix}target_atom2.csv", PULSE_COLUMNS, pulse_rows(o.branch_2.record, cfg.kappa))
    write_gnuplot(
        out / f"{prefix}target.gp",
        "Target photon, atom in |1> and |2>",
        "t (us)",
        "amplitude (us^-1/2)",
        [
            (f"{prefix}target_atom1.csv", 1, 2, "alpha_in"),
            (f"{prefix}target_atom1.csv", 1, 3, "alpha_out, atom in |1>"),
            (f"{prefix}target_atom2.csv", 1, 3, "alpha_out, atom in |2>"),
        ],
    )
    results = _gate_dict(o)
    results["target_delay_us"] = cfg.target_delay_us
    return {
        "results": results,
        "diagnostics": {
            "flux_ledger_residual": max(abs(o.ledger_atom_in_1), abs(o.ledger_atom_in_2), abs(o.storage.record.ledger_residual)),
            "storage_bookkeeping": o.storage.bookkeeping_error,
        },
    }


def sweep_rows(sweep):
    return [
        (o.cooperativity, o.p2, o.p_target, o.p_succ, o.scattered, o.phase_atom_in_1, o.phase_atom_in_2)
        for o in sweep.outcomes
    ]


def run_sweep(cfg: RunConfig, out: Path, prefix: str = "") -> dict:
    base = cfg.params.replace(omega_C=0.0)
    control = cfg.gaussian_pulse()
    target = target_pulse_for(control, cfg.target_delay_us)
    sw = sweep_cooperativity(
        base, target, cfg.grid.values(), target_delay=cfg.target_delay_us, variant=cfg.variant, workers=cfg.workers
    )
    write_csv(out / f"{prefix}sweep.csv", GATE_SWEEP_COLUMNS, sweep_rows(sw))
    write_gnuplot(
        out / f"{prefix}sweep.gp",
        "Gate figures of merit versus cooperativity",
        "C",
        "probability",
        [
            (f"{prefix}sweep.csv", 1, 3, "n_out = P_target"),
            (f"{prefix}sweep.csv", 1, 5, "scattered"),
            (f"{prefix}sweep.csv", 1, 4, "P_succ"),
        ],
        extra=("set logscale x", f"set arrow from {sw.dark_region_upper},0 to {sw.dark_region_upper},1 nohead"),
    )
    ledgers = [max(abs(o.ledger_atom_in_1), abs(o.ledger_atom_in_2)) for o in sw.outcomes]
    return {
        "results": {
            "zero_reflection_c": sw.zero_reflection_c,
            "dark_region_upper": sw.dark_region_upper,
            "points": len(sw.outcomes),
            "max_shift_error_c_ge_10": max(
                (abs(abs(o.conditional_shift) - math.pi) for o in sw.outcomes if o.cooperativity >= 10),
                default=None,
            ),
        },
        "diagnostics": {"flux_ledger_residual": max(ledgers)},
    }


RUNNERS = {"spectrum": run_spectrum, "pulse": run_pulse, "store": run_store, "gate": run_gate, "sweep": run_sweep}


def run(cfg: RunConfig, output_dir=None) -> dict:
    """Execute the scenario, write its files and summary.json; return the summary."""
    out = Path(output_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    part = RUNNERS[cfg.scenario](cfg, out)
    summary = _summary(cfg, part["results"], part["diagnostics"])
    write_json(out / "summary.json", summary)
    return summary
