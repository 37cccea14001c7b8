"""Pseudo-spectral laboratory for hydroelastic interfacial waves.

Evolves the tangent angle, vortex-sheet strength and period length of a
two-fluid interface carrying an elastic sheet (bending modulus sigma, sheet
mass rho0) under surface tension, and measures the approach to the pure
vortex sheet with surface tension as (sigma, rho0) -> (0, 0).
"""

from .errors import (ChordArcFailed, ClosureViolated, ConfigError,
                     DegenerateCurve, DuplicateZeroPair, FixedPointDiverged,
                     GridMismatch, HydroelasticError, InfeasibleFit,
                     InsufficientData, NonZeroMean, NotConverged,
                     StabilityViolated)
from .geometry import InterfaceState, PhysParams, make_state
from .stepping import StepPolicy, Trajectory

__all__ = [
    "InterfaceState", "PhysParams", "StepPolicy", "Trajectory", "make_state",
    "HydroelasticError", "NonZeroMean", "DegenerateCurve", "ClosureViolated",
    "GridMismatch", "NotConverged", "FixedPointDiverged", "StabilityViolated",
    "ChordArcFailed", "InfeasibleFit", "InsufficientData", "DuplicateZeroPair",
    "ConfigError",
]

__version__ = "0.1.0"
