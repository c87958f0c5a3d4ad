"""Domain exceptions.

Every error derives from a built-in so callers can keep catching
``ValueError``/``LookupError``/``RuntimeError`` where that is all they need.
"""

from __future__ import annotations


# ---- lie ----------------------------------------------------------------------

class NotSkew(ValueError):
    """Matrix is not skew-symmetric within tolerance."""


class NotInAlgebra(ValueError):
    """Complex matrix is not anti-Hermitian and traceless within tolerance."""


class NotUnit(ValueError):
    """Quaternion norm deviates from one beyond tolerance."""


# ---- control ------------------------------------------------------------------

class InvalidPhi(ValueError):
    """Domain size outside its admissible interval."""


class DegenerateForce(ValueError):
    """Desired force too small to define a thrust direction."""


class ProjectionSingular(ValueError):
    """Heading vector (anti)parallel to the desired thrust axis."""


class InsufficientHistory(LookupError):
    """Not enough desired-attitude samples to differentiate."""


# ---- dynamics -----------------------------------------------------------------

class DegenerateThrust(ValueError):
    """Reference acceleration cancels gravity; no thrust direction."""


class DegenerateHeading(ValueError):
    """Reference speed too small to derive a heading from velocity."""


class DegenerateSegment(ValueError):
    """Repeated waypoint in a spline reference."""


# ---- estimator ----------------------------------------------------------------

class NonPositiveDt(ValueError):
    """Prediction step with dt <= 0."""


class EmptyGyroBuffer(LookupError):
    """Externalization requested with no gyro sample since the last call."""


# ---- harness ------------------------------------------------------------------

class ConfigError(ValueError):
    """Invalid simulation configuration."""


class ParseError(ValueError):
    """Unparseable gains file or replay log."""


class SimulationDiverged(RuntimeError):
    """State norm exceeded the divergence bound."""


class PlotError(OSError):
    """Plot emission failed or had nothing to draw."""


__all__ = [
    "NotSkew",
    "NotInAlgebra",
    "NotUnit",
    "InvalidPhi",
    "DegenerateForce",
    "ProjectionSingular",
    "InsufficientHistory",
    "DegenerateThrust",
    "DegenerateHeading",
    "DegenerateSegment",
    "NonPositiveDt",
    "EmptyGyroBuffer",
    "ConfigError",
    "ParseError",
    "SimulationDiverged",
    "PlotError",
]
