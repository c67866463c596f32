"""Exception types raised by the simulator.

Every error carries the module and operation it came from so the CLI can
report it as machine-readable JSON.
"""


class CavityEITError(Exception):
    module = "core-model"

    def __init__(self, message, *, operation=None, module=None, context=None):
        super().__init__(message)
        self.message = message
        self.operation = operation
        if module is not None:
            self.module = module
        self.context = dict(context or {})

    def to_dict(self):
        return {
            "error": type(self).__name__,
            "module": self.module,
            "operation": self.operation,
            "message": self.message,
            "context": self.context,
        }


class ParameterError(CavityEITError, ValueError):
    """Non-physical or inconsistent input values."""


class SolverError(CavityEITError):
    """Steady-state solve failed (singular or ill-conditioned Liouvillian)."""

    module = "steady-state-engine"


class UndefinedPhaseError(CavityEITError):
    """Output field too weak for its phase to be meaningful."""


class IntegrationError(CavityEITError):
    """Adaptive integrator failed (step underflow or ledger violation)."""

    module = "pulse-engine"


class ProtocolInvalidError(CavityEITError):
    """Impedance-matched storage is undefined for C <= 1/2."""

    module = "storage-synthesis"


class InfeasiblePulseError(CavityEITError):
    """Input pulse is too fast for the cavity to absorb it without reflection."""

    module = "storage-synthesis"


class ConfigError(CavityEITError, ValueError):
    module = "cli-io"
