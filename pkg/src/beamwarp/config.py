"""Run configuration: schema, YAML round-trip and object factories.

A run is described by a flat key/value document (YAML). Defaults reproduce
the standard validation setup: unit square section, degree 3, 5 elements per
direction, Saint Venant-Kirchhoff steel-like moduli, single load step,
production (pk2) formulation.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import yaml

from .errors import ConfigError
from .kinematics import StrainPrescriptors
from .material import MooneyRivlin, NeoHooke, SaintVenantKirchhoff
from .splines import rectangle_patch, unit_circle_patch, unit_square_patch

SECTIONS = ("square", "circle", "rectangle")
MATERIALS = ("svk", "neo_hooke", "mooney_rivlin")
FORMULATIONS = ("pk2", "pk1")

#: reference moduli (GPa): lam/mu consistent with E = 208.16, nu = 0.3,
#: K = 174.34; the NH/MR coefficients share the same small-strain response
MATERIAL_DEFAULTS = {
    "svk": {"lam": 121.0, "mu": 80.0},
    "neo_hooke": {"a10": 40.0, "bulk": 174.34},
    "mooney_rivlin": {"b10": 30.0, "b01": 10.0, "bulk": 174.34},
}

_MATERIAL_CLASSES = {
    "svk": SaintVenantKirchhoff,
    "neo_hooke": NeoHooke,
    "mooney_rivlin": MooneyRivlin,
}


@dataclass
class RunConfig:
    """Schema-validated description of one solver run."""

    section: str = "square"
    section_a: float = 1.0   # rectangle half-width |X1| < a, mm
    section_b: float = 0.5   # rectangle half-width |X2| < b, mm
    degree: int = 3
    elements: int = 5
    material: str = "svk"
    material_params: dict = field(default_factory=dict)
    eps: tuple = (0.0, 0.0, 0.0)
    kappa: tuple = (0.0, 0.0, 0.0)
    load_steps: int = 1
    formulation: str = "pk2"
    tolerance: float = 1e-10
    output_dir: str = "out"
    grid: int = 40

    def __post_init__(self):
        if self.section not in SECTIONS:
            raise ConfigError(f"unknown section {self.section!r}; use one of {SECTIONS}")
        if self.material not in MATERIALS:
            raise ConfigError(f"unknown material {self.material!r}; use one of {MATERIALS}")
        if self.formulation not in FORMULATIONS:
            raise ConfigError(
                f"unknown formulation {self.formulation!r}; use one of {FORMULATIONS}"
            )
        if self.degree < 1 or self.elements < 1:
            raise ConfigError("degree and elements must be positive")
        if self.load_steps < 1:
            raise ConfigError("load_steps must be >= 1")
        if self.tolerance <= 0:
            raise ConfigError("tolerance must be positive")
        if self.grid < 1:
            raise ConfigError("grid must be >= 1")
        if self.section_a <= 0 or self.section_b <= 0:
            raise ConfigError("rectangle half-widths must be positive")
        self.eps = tuple(float(v) for v in self.eps)
        self.kappa = tuple(float(v) for v in self.kappa)
        if len(self.eps) != 3 or len(self.kappa) != 3:
            raise ConfigError("eps and kappa must have three components")
        defaults = MATERIAL_DEFAULTS[self.material]
        unknown = set(self.material_params) - set(defaults)
        if unknown:
            raise ConfigError(
                f"unknown parameters {sorted(unknown)} for material {self.material!r}; "
                f"expected a subset of {sorted(defaults)}"
            )
        self.material_params = {
            k: float(self.material_params.get(k, v)) for k, v in defaults.items()
        }

    def patch(self):
        if self.section == "square":
            return unit_square_patch(self.degree, self.elements)
        if self.section == "circle":
            return unit_circle_patch(self.degree, self.elements)
        return rectangle_patch(self.section_a, self.section_b, self.degree, self.elements)

    def material_model(self):
        return _MATERIAL_CLASSES[self.material](**self.material_params)

    def prescriptors(self) -> StrainPrescriptors:
        return StrainPrescriptors(self.eps, self.kappa)

    def solve_options(self):
        from .solver import SolveOptions

        return SolveOptions(tolerance=self.tolerance, load_steps=self.load_steps)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["eps"] = list(self.eps)
        d["kappa"] = list(self.kappa)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration document must be a mapping")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def parse(text: str) -> RunConfig:
    """Parse a YAML configuration document."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    return RunConfig.from_dict(data or {})


def serialize(config: RunConfig) -> str:
    """Serialize back to YAML; parse(serialize(c)) == c."""
    return yaml.safe_dump(config.to_dict(), sort_keys=True)


def load(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())
