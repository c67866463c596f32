"""CSV / JSON / gnuplot writers with deterministic formatting."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

SPECTRUM_COLUMNS = ("delta_over_kappa", "phase_over_pi", "n_intra_normalized", "re_a_out", "im_a_out")
PULSE_COLUMNS = ("t_us", "re_alpha_in", "re_alpha_out", "im_alpha_out", "p1", "p2", "p3", "omega_c_over_kappa")
CONTROL_COLUMNS = ("t_us", "omega_c_over_kappa")
STORAGE_SWEEP_COLUMNS = ("C", "P1", "P2", "leak", "scattered")
GATE_SWEEP_COLUMNS = ("C", "p2", "p_target", "p_succ", "scattered", "phase_1", "phase_2")


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def write_csv(path, columns, rows) -> Path:
    """Header row, 17 significant digits, '\\n' line endings."""
    path = Path(path)
    lines = [",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(columns)}")
        lines.append(",".join(fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    return obj


def write_json(path, payload) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_gnuplot(path, title, xlabel, ylabel, curves, extra=()) -> Path:
    """``curves`` is a list of (csv file, x column, y column, legend)."""
    lines = [
        "# gnuplot script",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{title}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        *extra,
    ]
    parts = [f"'{f}' using {x}:{y} with lines title '{label}'" for f, x, y, label in curves]
    lines.append("plot " + ", \\\n     ".join(parts))
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def pulse_rows(record, kappa):
    """Rows for PULSE_COLUMNS; ``kappa`` converts Ω_C to units of κ."""
    return zip(
        record.time_grid,
        record.alpha_in.real,
        record.alpha_out.real,
        record.alpha_out.imag,
        record.p1,
        record.p2,
        record.p3,
        record.omega_c / kappa,
    )


def spectrum_rows(points):
    n = np.array([p.n_intra for p in points])
    n_norm = n / n.max()
    return [
        (p.delta, p.phase / np.pi, nn, p.a_out_mean.real, p.a_out_mean.imag) for p, nn in zip(points, n_norm)
    ]
