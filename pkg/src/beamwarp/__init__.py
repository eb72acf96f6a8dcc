"""Nonlinear warping of hyperelastic beam cross-sections.

Solves the cross-section warping problem for prescribed beam strain measures
with an isogeometric discretization, and post-processes stress resultants and
the tangent beam stiffness via adjoint sensitivity solves. A reference
formulation built on the first Piola-Kirchhoff stress ships alongside the
production Voigt-based path as a verification oracle.
"""

from .errors import (
    BeamWarpError,
    ConfigError,
    DivergenceError,
    FactorizationError,
    GeometryError,
    InvertedStateError,
    ParameterError,
    SingularPointError,
    StepFailureError,
)
from .kinematics import StrainPrescriptors
from .material import MooneyRivlin, NeoHooke, SaintVenantKirchhoff
from .solver import SolveOptions, Solution, newton_solve
from .splines import (
    Patch,
    SectionQuadrature,
    open_knot_vector,
    rectangle_patch,
    unit_circle_patch,
    unit_square_patch,
)
from .response import (
    BeamResponse,
    beam_energy,
    beam_response,
    beam_stiffness,
    sample_fields,
    stress_resultants,
)

__all__ = [
    "BeamWarpError",
    "BeamResponse",
    "ConfigError",
    "DivergenceError",
    "FactorizationError",
    "GeometryError",
    "InvertedStateError",
    "MooneyRivlin",
    "NeoHooke",
    "ParameterError",
    "Patch",
    "SaintVenantKirchhoff",
    "SectionQuadrature",
    "SingularPointError",
    "SolveOptions",
    "Solution",
    "StepFailureError",
    "StrainPrescriptors",
    "beam_energy",
    "beam_response",
    "beam_stiffness",
    "newton_solve",
    "open_knot_vector",
    "rectangle_patch",
    "sample_fields",
    "stress_resultants",
    "unit_circle_patch",
    "unit_square_patch",
]

__version__ = "0.1.0"
