"""Dirac-fermion propagators in graphene under SUSY-intertwined magnetic fields.

The package builds the first-order intertwined partner of a uniform or an
exponentially decaying seed field, its Pauli-type bound states, the Ritus
matrices and momentum-space propagator, and the mode charge and current
densities.
"""

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    LevelError,
    PoleError,
    SingularTransformError,
    SusyRitusError,
    UnsupportedTransformError,
)
from .intertwine import IntertwinedSystem
from .presets import PRESETS, get_preset
from .seeds import EXPONENTIAL, UNIFORM, FieldConfig, FieldWarning, SeedSystem

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "EXPONENTIAL",
    "FieldConfig",
    "FieldWarning",
    "IntertwinedSystem",
    "LevelError",
    "PRESETS",
    "PoleError",
    "SeedSystem",
    "SingularTransformError",
    "SusyRitusError",
    "UNIFORM",
    "UnsupportedTransformError",
    "get_preset",
]
