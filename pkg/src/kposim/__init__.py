"""Truncated-Fock-space simulator for Kerr parametric oscillators with a
counter-diabatic tunable-coupling scheme."""

__version__ = "0.1.0"

from .errors import (
    CalibrationError,
    ConfigError,
    FrameError,
    IntegrationError,
    KposimError,
    ParameterError,
    PhaseUnreliableError,
    TruncationError,
    TruncationWarning,
)
from .fock import (
    DensityMatrix,
    FockSpace,
    OperatorMatrix,
    StateVector,
    cat_state,
    coherent_state,
    fock_state,
    product_state,
)
from .hamiltonians import KpoSystemParams

__all__ = [
    "CalibrationError",
    "ConfigError",
    "FrameError",
    "IntegrationError",
    "KposimError",
    "ParameterError",
    "PhaseUnreliableError",
    "TruncationError",
    "TruncationWarning",
    "DensityMatrix",
    "FockSpace",
    "OperatorMatrix",
    "StateVector",
    "cat_state",
    "coherent_state",
    "fock_state",
    "product_state",
    "KpoSystemParams",
    "__version__",
]
