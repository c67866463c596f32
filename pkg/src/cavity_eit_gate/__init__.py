"""Cavity-EIT photonic phase gate: steady-state spectra, single-photon pulse
scattering, control-photon storage and the combined gate protocol."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CavityEITError,
    ConfigError,
    InfeasiblePulseError,
    IntegrationError,
    ParameterError,
    ProtocolInvalidError,
    SolverError,
    UndefinedPhaseError,
)
from .model import (  # noqa: E402
    GaussianPulse,
    HilbertSpace,
    SystemParams,
    build_collapse_operators,
    build_hamiltonian,
    kappa_from_mhz,
)
from .steady import (  # noqa: E402
    DensityMatrix,
    SpectrumPoint,
    output_field,
    paired_spectrum,
    phase_spectrum,
    solve_steady_state,
)
from .pulse import ScatteringRecord, eit_window_check, extract_pulse_phase, integrate  # noqa: E402
from .storage import ControlPulse, StorageResult, storage_efficiency, synthesize_control  # noqa: E402
from .gate import (  # noqa: E402
    GateOutcome,
    analytic_reflection,
    run_classical_gate,
    run_full_gate,
    run_target_scattering,
    sweep_cooperativity,
)
from .config import RunConfig, load_config, parse_config  # noqa: E402

__all__ = [
    "__version__",
    "CavityEITError",
    "ConfigError",
    "ControlPulse",
    "DensityMatrix",
    "GateOutcome",
    "GaussianPulse",
    "HilbertSpace",
    "InfeasiblePulseError",
    "IntegrationError",
    "ParameterError",
    "ProtocolInvalidError",
    "RunConfig",
    "ScatteringRecord",
    "SolverError",
    "SpectrumPoint",
    "StorageResult",
    "SystemParams",
    "UndefinedPhaseError",
    "analytic_reflection",
    "build_collapse_operators",
    "build_hamiltonian",
    "eit_window_check",
    "extract_pulse_phase",
    "integrate",
    "kappa_from_mhz",
    "load_config",
    "output_field",
    "paired_spectrum",
    "parse_config",
    "phase_spectrum",
    "run_classical_gate",
    "run_full_gate",
    "run_target_scattering",
    "solve_steady_state",
    "storage_efficiency",
    "sweep_cooperativity",
    "synthesize_control",
]
