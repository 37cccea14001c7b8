"""Exception types shared across the package."""


class HydroelasticError(Exception):
    """Base class for all package-specific errors."""


class NonZeroMean(HydroelasticError):
    """Antiderivative requested for a field whose mean is not (numerically) zero."""


class DegenerateCurve(HydroelasticError):
    """The tangent-angle field left the admissible set (mean of cos(theta) too small,
    or coincident curve points made a singular kernel)."""


class ClosureViolated(HydroelasticError):
    """|<sin theta>| exceeds tolerance: the reconstructed curve would not be
    horizontally periodic."""


class GridMismatch(HydroelasticError):
    """Two fields or states that must share a grid have different sizes."""


class NotConverged(HydroelasticError):
    """An iterative probe failed to converge (reported, normally not raised)."""


class FixedPointDiverged(HydroelasticError):
    """The fixed-point solve for gamma_t did not converge within the iteration cap."""


class StabilityViolated(HydroelasticError):
    """A time step produced a norm blow-up beyond the allowed growth factor."""


class ChordArcFailed(HydroelasticError):
    """The chord-arc monitor fell below its floor during a run."""


class InfeasibleFit(HydroelasticError):
    """No admissible logarithmic bound majorizes the energy series."""


class InsufficientData(HydroelasticError):
    """Too few valid points for a regression."""


class DuplicateZeroPair(HydroelasticError):
    """A sweep parameter list must contain the (0, 0) pair exactly once."""


class ConfigError(HydroelasticError):
    """Configuration file missing, unparsable, or referencing unknown keys."""

    def __init__(self, message, path=None, key=None, line=None):
        self.path = path
        self.key = key
        self.line = line
        parts = [message]
        if path is not None:
            parts.append(f"path={path}")
        if key is not None:
            parts.append(f"key={key}")
        if line is not None:
            parts.append(f"line={line}")
        super().__init__(" | ".join(str(p) for p in parts))
