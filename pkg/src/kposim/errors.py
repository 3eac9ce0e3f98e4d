"""Exception types shared across the simulator."""


class KposimError(Exception):
    """Base class for all simulator errors."""


class ParameterError(KposimError, ValueError):
    """Invalid physical parameter, mode index, or dimension mismatch."""


class TruncationError(KposimError):
    """Fock-space cutoff too small for the requested state (strict mode)."""


class TruncationWarning(UserWarning):
    """Fock-space cutoff marginal for the requested state (soft mode)."""


class IntegrationError(KposimError, RuntimeError):
    """Time integration violated a conservation monitor."""


class CalibrationError(KposimError):
    """Requested gate phase is outside the reachable range."""


class FrameError(KposimError):
    """State cannot be expressed in the qubit frame within tolerance."""


class PhaseUnreliableError(KposimError):
    """Final state left the qubit space; extracted phase is meaningless."""


class ConfigError(KposimError):
    """Invalid experiment configuration."""
