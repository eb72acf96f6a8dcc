"""Exception types shared across the solver stack."""


class BeamWarpError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(BeamWarpError, ValueError):
    """Invalid construction parameter (degree, element count, moduli, ...)."""


class GeometryError(BeamWarpError):
    """Geometry mapping is singular or invalid at an evaluation point."""


class SingularPointError(BeamWarpError):
    """A constraint kernel was evaluated too close to the section origin."""


class InvertedStateError(BeamWarpError):
    """Deformation state with non-positive volume ratio (det F or det C).

    Carries the physical location of the offending quadrature point when
    raised during assembly.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class DivergenceError(BeamWarpError):
    """Newton iteration failed to reach the tolerance; keeps the history."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history if history is not None else []


class StepFailureError(BeamWarpError):
    """Load stepping kept producing inverted states even at the step cap."""


class FactorizationError(BeamWarpError):
    """Tangent matrix is singular or numerically rank deficient."""


class ConfigError(BeamWarpError, ValueError):
    """Run configuration failed schema validation."""
