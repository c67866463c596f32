"""Run configuration: JSON documents with nested sections, validated strictly.

Example::

    {
      "scenario": "spectrum",
      "kappa_MHz": 2.5,
      "system": {"g_over_kappa": 5, "gamma_31_over_kappa": 0.6,
                 "gamma_32_over_kappa": 0.6, "omega_c_over_kappa": 3,
                 "epsilon_over_kappa": 0.1},
      "grid": {"start": -10, "stop": 10, "count": 401}
    }

Rates are given in units of κ, κ itself as κ/2π in MHz, times in μs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .gate import LONG_PULSE_FWHM
from .model import GaussianPulse, SystemParams, kappa_from_mhz

SCENARIOS = ("spectrum", "pulse", "store", "gate", "sweep")
VARIANTS = ("standard", "as-printed")

TOP_KEYS = {"scenario", "kappa_MHz", "system", "pulse", "grid", "variant", "long_pulse", "output_dir", "n_fock", "workers"}
SYSTEM_KEYS = {
    "g_over_kappa",
    "cooperativity",
    "gamma_31_over_kappa",
    "gamma_32_over_kappa",
    "omega_c_over_kappa",
    "epsilon_over_kappa",
    "delta_over_kappa",
    "kappa_B_over_kappa",
}
NONNEGATIVE = SYSTEM_KEYS - {"delta_over_kappa"}
PULSE_KEYS = {"t0_us", "fwhm_us", "target_delay_us"}
GRID_KEYS = {"start", "stop", "count", "spacing"}


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    def to_dict(self) -> dict:
        return {"start": self.start, "stop": self.stop, "count": self.count, "spacing": self.spacing}


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    kappa_mhz: float
    system: dict
    pulse: dict | None = None
    grid: GridSpec | None = None
    variant: str = "standard"
    long_pulse: bool = False
    output_dir: str = "out"
    n_fock: int = 3
    workers: int = 1
    seedless: bool = field(default=True, init=False)

    @property
    def kappa(self) -> float:
        """κ in rad/μs."""
        return kappa_from_mhz(self.kappa_mhz)

    def params_in_kappa_units(self) -> SystemParams:
        s = self.system
        kb = s.get("kappa_B_over_kappa", 0.0)
        g31, g32 = s["gamma_31_over_kappa"], s["gamma_32_over_kappa"]
        if "cooperativity" in s:
            g = math.sqrt(2.0 * (g31 + g32) * s["cooperativity"])
        else:
            g = s["g_over_kappa"]
        return SystemParams(
            g=g,
            kappa_A=1.0 - kb,
            kappa_B=kb,
            gamma_31=g31,
            gamma_32=g32,
            delta=s.get("delta_over_kappa", 0.0),
            omega_C=s.get("omega_c_over_kappa", 0.0),
            epsilon=s.get("epsilon_over_kappa", 0.0),
        )

    @property
    def params(self) -> SystemParams:
        """System parameters in rad/μs."""
        return self.params_in_kappa_units().scaled(self.kappa)

    def gaussian_pulse(self) -> GaussianPulse:
        if self.pulse is None:
            raise ConfigError("this scenario needs a 'pulse' section", operation="parse_config")
        if self.long_pulse:
            fwhm = LONG_PULSE_FWHM / self.kappa
            eta = GaussianPulse.from_fwhm(0.0, fwhm).eta
            return GaussianPulse(t0=8.0 * eta, eta=eta)
        return GaussianPulse.from_fwhm(self.pulse["t0_us"], self.pulse["fwhm_us"])

    @property
    def target_delay_us(self) -> float:
        pulse = self.pulse or {}
        if "target_delay_us" in pulse:
            return pulse["target_delay_us"]
        fwhm = LONG_PULSE_FWHM / self.kappa if self.long_pulse else pulse.get("fwhm_us", 1.0)
        return 4.0 * fwhm

    def to_dict(self) -> dict:
        out = {
            "scenario": self.scenario,
            "kappa_MHz": self.kappa_mhz,
            "system": dict(self.system),
            "variant": self.variant,
            "long_pulse": self.long_pulse,
            "output_dir": self.output_dir,
            "n_fock": self.n_fock,
            "workers": self.workers,
        }
        if self.pulse is not None:
            out["pulse"] = dict(self.pulse)
        if self.grid is not None:
            out["grid"] = self.grid.to_dict()
        return out

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _number(value, path, *, nonnegative=False, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path} must be a number, got {value!r}", operation="parse_config", context={"path": path})
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{path} must be finite", operation="parse_config", context={"path": path})
    if nonnegative and value < 0:
        raise ConfigError(f"{path} must be >= 0, got {value}", operation="parse_config", context={"path": path})
    if positive and value <= 0:
        raise ConfigError(f"{path} must be > 0, got {value}", operation="parse_config", context={"path": path})
    return value


def _unknown(section: dict, allowed: set, prefix: str):
    extra = sorted(set(section) - allowed)
    if extra:
        paths = [f"{prefix}{k}" for k in extra]
        raise ConfigError(f"unknown keys: {', '.join(paths)}", operation="parse_config", context={"paths": paths})


def _section(doc, key):
    value = doc.get(key)
    if value is not None and not isinstance(value, dict):
        raise ConfigError(f"{key} must be an object", operation="parse_config", context={"path": key})
    return value


def parse_config(text, *, scenario: str | None = None) -> RunConfig:
    """Validate a JSON document (string or already-parsed dict) into a RunConfig.

    ``scenario`` fills in a missing scenario key (used by CLI subcommands) and
    must agree with it when both are present.
    """
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}", operation="parse_config") from None
    else:
        doc = dict(text)
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object", operation="parse_config")
    _unknown(doc, TOP_KEYS, "")

    if scenario is not None:
        if "scenario" in doc and doc["scenario"] != scenario:
            raise ConfigError(
                f"config scenario {doc['scenario']!r} does not match command {scenario!r}", operation="parse_config"
            )
        doc["scenario"] = scenario

    missing = [k for k in ("scenario", "kappa_MHz", "system") if k not in doc]
    if missing:
        raise ConfigError(
            f"missing required keys: {', '.join(missing)}", operation="parse_config", context={"missing": missing}
        )
    if doc["scenario"] not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {SCENARIOS}", operation="parse_config", context={"path": "scenario"})
    kappa_mhz = _number(doc["kappa_MHz"], "kappa_MHz", positive=True)

    system_doc = _section(doc, "system") or {}
    _unknown(system_doc, SYSTEM_KEYS, "system.")
    system = {k: _number(v, f"system.{k}", nonnegative=k in NONNEGATIVE) for k, v in system_doc.items()}
    required = [f"system.{k}" for k in ("gamma_31_over_kappa", "gamma_32_over_kappa") if k not in system]
    if "g_over_kappa" not in system and "cooperativity" not in system:
        required.append("system.g_over_kappa")
    if "g_over_kappa" in system and "cooperativity" in system:
        raise ConfigError("give either system.g_over_kappa or system.cooperativity", operation="parse_config")
    if system.get("kappa_B_over_kappa", 0.0) >= 1.0:
        raise ConfigError("system.kappa_B_over_kappa must be < 1", operation="parse_config")

    pulse_doc = _section(doc, "pulse")
    pulse = None
    if pulse_doc is not None:
        _unknown(pulse_doc, PULSE_KEYS, "pulse.")
        pulse = {k: _number(v, f"pulse.{k}", positive=k != "t0_us") for k, v in pulse_doc.items()}

    grid_doc = _section(doc, "grid")
    grid = None
    if grid_doc is not None:
        _unknown(grid_doc, GRID_KEYS, "grid.")
        for k in ("start", "stop", "count"):
            if k not in grid_doc:
                required.append(f"grid.{k}")
        if not [r for r in required if r.startswith("grid.")]:
            count = grid_doc["count"]
            if isinstance(count, bool) or not isinstance(count, int) or count < 1:
                raise ConfigError("grid.count must be a positive integer", operation="parse_config")
            spacing = grid_doc.get("spacing", "linear")
            if spacing not in ("linear", "log"):
                raise ConfigError("grid.spacing must be 'linear' or 'log'", operation="parse_config")
            start, stop = _number(grid_doc["start"], "grid.start"), _number(grid_doc["stop"], "grid.stop")
            if stop < start or (spacing == "log" and start <= 0):
                raise ConfigError("grid range is empty or invalid for its spacing", operation="parse_config")
            grid = GridSpec(start, stop, count, spacing)

    sc = doc["scenario"]
    long_pulse = doc.get("long_pulse", False)
    if not isinstance(long_pulse, bool):
        raise ConfigError("long_pulse must be true or false", operation="parse_config")
    if sc == "spectrum":
        for k in ("epsilon_over_kappa", "omega_c_over_kappa"):
            if k not in system:
                required.append(f"system.{k}")
        if grid_doc is None:
            required.append("grid")
    if sc in ("pulse", "store", "gate", "sweep"):
        if pulse is None:
            required.append("pulse")
        elif not long_pulse:
            required += [f"pulse.{k}" for k in ("t0_us", "fwhm_us") if k not in pulse]
    if sc == "sweep" and grid_doc is None:
        required.append("grid")
    if required:
        raise ConfigError(
            f"missing required keys: {', '.join(required)}", operation="parse_config", context={"missing": required}
        )
    if sc == "sweep" and grid.count < 2:
        raise ConfigError("sweep grids need count >= 2", operation="parse_config", context={"path": "grid.count"})
    if sc == "spectrum" and system["epsilon_over_kappa"] <= 0:
        raise ConfigError("spectrum needs epsilon_over_kappa > 0", operation="parse_config")
    if sc == "spectrum" and system["omega_c_over_kappa"] <= 0:
        raise ConfigError("spectrum needs omega_c_over_kappa > 0 for the control-on branch", operation="parse_config")

    variant = doc.get("variant", "standard")
    if variant not in VARIANTS:
        raise ConfigError(f"variant must be one of {VARIANTS}", operation="parse_config", context={"path": "variant"})
    n_fock = doc.get("n_fock", 3)
    workers = doc.get("workers", 1)
    for name, value in (("n_fock", n_fock), ("workers", workers)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ConfigError(f"{name} must be a positive integer", operation="parse_config", context={"path": name})
    output_dir = doc.get("output_dir", "out")
    if not isinstance(output_dir, str):
        raise ConfigError("output_dir must be a string", operation="parse_config")

    cfg = RunConfig(
        scenario=sc,
        kappa_mhz=kappa_mhz,
        system=system,
        pulse=pulse,
        grid=grid,
        variant=variant,
        long_pulse=long_pulse,
        output_dir=output_dir,
        n_fock=n_fock,
        workers=workers,
    )
    try:
        cfg.params_in_kappa_units()
    except ValueError as exc:
        raise ConfigError(str(exc), operation="parse_config") from None
    return cfg


def load_config(path, *, scenario=None) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), scenario=scenario)
