"""Built-in presets reproducing the data behind Figs. 2-5."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .config import parse_config
from .gate import run_target_scattering, sweep_cooperativity, target_pulse_for
from .output import (
    CONTROL_COLUMNS,
    PULSE_COLUMNS,
    GATE_SWEEP_COLUMNS,
    STORAGE_SWEEP_COLUMNS,
    pulse_rows,
    write_csv,
    write_gnuplot,
    write_json,
)
from .pulse import eit_window_check
from .runner import _summary, run_pulse, run_spectrum, sweep_rows
from .steady import phase_spectrum
from .storage import storage_efficiency, synthesize_control

FIGURES = ("fig2", "fig3", "fig4", "fig5")

# κ/2π is only stated for Fig. 3; Figs. 4-5 reuse it.
_DECAY = {"gamma_31_over_kappa": 0.6, "gamma_32_over_kappa": 0.6}

PRESETS = {
    "fig2": {
        "scenario": "spectrum",
        "kappa_MHz": 2.5,
        "system": {"g_over_kappa": 5.0, **_DECAY, "omega_c_over_kappa": 3.0, "epsilon_over_kappa": math.sqrt(1e-2)},
        "grid": {"start": -10.0, "stop": 10.0, "count": 401, "spacing": "linear"},
    },
    "fig3": {
        "scenario": "pulse",
        "kappa_MHz": 2.5,
        "system": {"g_over_kappa": 10.0, **_DECAY},
        "pulse": {"t0_us": 4.0, "fwhm_us": 1.0},
    },
    "fig4": {
        "scenario": "store",
        "kappa_MHz": 2.5,
        "system": {"g_over_kappa": 10.0, **_DECAY},
        "pulse": {"t0_us": 4.0, "fwhm_us": 1.0, "target_delay_us": 4.0},
        "grid": {"start": 0.6, "stop": 100.0, "count": 25, "spacing": "log"},
    },
    "fig5": {
        "scenario": "sweep",
        "kappa_MHz": 2.5,
        "system": {"cooperativity": 100.0, **_DECAY},
        "pulse": {"t0_us": 4.0, "fwhm_us": 1.0, "target_delay_us": 4.0},
        "grid": {"start": 0.2, "stop": 100.0, "count": 40, "spacing": "log"},
    },
}

FIG3_OMEGAS = (0.0, 2.0, 10.0)
FIG5B_COOPERATIVITIES = (0.25, 0.5, 2.0, 10.0)


def preset(figure: str, variant: str = "standard"):
    if figure not in PRESETS:
        raise ValueError(f"unknown figure {figure!r}; choose from {FIGURES}")
    return parse_config({**PRESETS[figure], "variant": variant})


def _fig2(cfg, out):
    part = run_spectrum(cfg, out, prefix="fig2_")
    return part


def _fig3(cfg, out):
    results, diag = {}, {}
    curves = []
    for om in FIG3_OMEGAS:
        tag = f"fig3_omega{om:g}_"
        part = run_pulse(cfg, out, prefix=tag, omega_over_kappa=om)
        results[f"omega_{om:g}"] = part["results"]
        diag[f"omega_{om:g}"] = part["diagnostics"]
        curves.append((f"{tag}pulse.csv", 1, 3, f"Omega_C = {om:g} kappa"))
    write_gnuplot(
        out / "fig3.gp",
        "Output pulses",
        "t (us)",
        "alpha (us^-1/2)",
        [("fig3_omega0_pulse.csv", 1, 2, "alpha_in"), *curves],
    )

    # inset: pulse power spectrum against the transparency windows (κ units)
    pk = cfg.params_in_kappa_units()
    pulse = cfg.gaussian_pulse()
    eta_k = pulse.eta * cfg.kappa
    grid = np.linspace(-2.0, 2.0, 201)
    spectrum = np.exp(-((grid * eta_k) ** 2))
    cols = [grid, spectrum]
    for om in FIG3_OMEGAS[1:]:
        pts = phase_spectrum(pk.replace(omega_C=om, epsilon=1e-2), None, grid)
        n = np.array([p.n_intra for p in pts])
        cols.append(n / n.max())
        w = eit_window_check(cfg.params.replace(omega_C=om * cfg.kappa), pulse)
        results[f"omega_{om:g}"]["eit_window_over_kappa"] = w.window_width / cfg.kappa
    write_csv(
        out / "fig3_inset.csv",
        ("delta_over_kappa", "pulse_spectrum", "n_intra_omega2", "n_intra_omega10"),
        zip(*cols),
    )
    results["pulse_spectral_fwhm_over_kappa"] = pulse.spectral_fwhm / cfg.kappa
    return {"results": results, "diagnostics": diag}


def _fig4(cfg, out):
    params = cfg.params
    control_photon = cfg.gaussian_pulse()
    target = target_pulse_for(control_photon, cfg.target_delay_us)
    control = synthesize_control(params, control_photon)
    write_csv(out / "fig4a_control.csv", CONTROL_COLUMNS, zip(control.time_grid, control.omega_c / cfg.kappa))
    t = np.linspace(0.0, target.t0 + 4.0, 1201)
    write_csv(
        out / "fig4a_pulses.csv",
        ("t_us", "control_photon", "target_photon"),
        zip(t, control_photon(t) / control_photon.amplitude_norm, target(t) / target.amplitude_norm),
    )
    rows, book, ledger = [], 0.0, 0.0
    for c in cfg.grid.values():
        res = storage_efficiency(params.with_cooperativity(c), control_photon, variant=cfg.variant)
        rows.append((c, res.p1, res.p2, res.leak, res.scattered))
        book = max(book, abs(res.bookkeeping_error))
        ledger = max(ledger, abs(res.record.ledger_residual))
    write_csv(out / "fig4b_storage.csv", STORAGE_SWEEP_COLUMNS, rows)
    write_gnuplot(
        out / "fig4b.gp",
        "Storage probabilities",
        "C",
        "probability",
        [("fig4b_storage.csv", 1, 2, "P1"), ("fig4b_storage.csv", 1, 3, "P2")],
        extra=("set logscale x",),
    )
    write_gnuplot(
        out / "fig4a.gp",
        "Control field",
        "t (us)",
        "Omega_C/kappa",
        [("fig4a_control.csv", 1, 2, "Omega_C")],
    )
    p2 = np.array([r[2] for r in rows])
    return {
        "results": {
            "g_over_kappa": params.g / cfg.kappa,
            "omega_c_start_over_kappa": control.omega_c[0] / cfg.kappa,
            "omega_c_end_over_kappa": control.omega_c[-1] / cfg.kappa,
            "p2_at_max_c": p2[-1],
            "p2_monotone": bool(np.all(np.diff(p2) >= -1e-9)),
            "max_leak": max(r[3] for r in rows),
        },
        "diagnostics": {"storage_bookkeeping": book, "flux_ledger_residual": ledger},
    }


def _fig5(cfg, out):
    params = cfg.params
    control_photon = cfg.gaussian_pulse()
    target = target_pulse_for(control_photon, cfg.target_delay_us)
    # (a) C ≈ 100, atom in |1> and |2>
    p100 = params.with_cooperativity(100.0)
    for state in (1, 2):
        b = run_target_scattering(p100, target, state, cfg.variant)
        write_csv(out / f"fig5a_atom{state}.csv", PULSE_COLUMNS, pulse_rows(b.record, cfg.kappa))
    # (b) atom in |1> at several cooperativities
    for c in FIG5B_COOPERATIVITIES:
        b = run_target_scattering(params.with_cooperativity(c), target, 1, cfg.variant)
        write_csv(out / f"fig5b_C{c:g}.csv", PULSE_COLUMNS, pulse_rows(b.record, cfg.kappa))
    # (c), (d)
    sw = sweep_cooperativity(
        params, target, cfg.grid.values(), target_delay=cfg.target_delay_us, variant=cfg.variant, workers=cfg.workers
    )
    write_csv(out / "fig5cd_sweep.csv", GATE_SWEEP_COLUMNS, sweep_rows(sw))
    write_csv(
        out / "fig5c_dark_region.csv",
        ("c_lower", "c_upper"),
        [(sw.c_grid[0], sw.dark_region_upper)],
    )
    write_gnuplot(
        out / "fig5c.gp",
        "Photons out and scattered light, atom in |1>",
        "C",
        "",
        [("fig5cd_sweep.csv", 1, 3, "n_out"), ("fig5cd_sweep.csv", 1, 5, "scattered")],
        extra=("set logscale x", f"set object 1 rect from graph 0,0 to first {sw.dark_region_upper},graph 1 fc rgb 'gray'"),
    )
    write_gnuplot(
        out / "fig5d.gp",
        "Gate success probability",
        "C",
        "P_succ",
        [("fig5cd_sweep.csv", 1, 4, "P_succ")],
        extra=("set logscale x",),
    )
    return {
        "results": {"zero_reflection_c": sw.zero_reflection_c, "dark_region_upper": sw.dark_region_upper},
        "diagnostics": {
            "flux_ledger_residual": max(max(abs(o.ledger_atom_in_1), abs(o.ledger_atom_in_2)) for o in sw.outcomes)
        },
    }


_BUILDERS = {"fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5}


def emit_figure_bundle(figure: str, output_dir, variant: str = "standard") -> dict:
    cfg = preset(figure, variant)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    part = _BUILDERS[figure](cfg, out)
    summary = _summary(cfg, part["results"], part["diagnostics"])
    summary["figure"] = figure
    write_json(out / f"{figure}_summary.json", summary)
    return summary
