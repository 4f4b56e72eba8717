# types/common.py

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from ..errors import SchemaError


class ManifoldKind(Enum):
    """Supported ambient geometries"""
    EUCLIDEAN_PLANE = "EuclideanPlane"
    EUCLIDEAN_SPACE3 = "EuclideanSpace3"
    FLAT_TORUS3 = "FlatTorus3"
    HYPERBOLIC_SPACE3 = "HyperbolicSpace3"


class CurveKind(Enum):
    """Supported curve descriptions"""
    CIRCLE3 = "Circle3"
    ELLIPSE3 = "Ellipse3"
    TORUS_KNOT = "TorusKnot"
    CIRCLE2 = "Circle2"
    CIRCLE_H3 = "CircleH3"
    SAMPLED = "Sampled"


class SchemeKind(Enum):
    """Renormalization schemes for the principal operator"""
    REGULARIZED = "Regularized"
    BOUND_STATE_3D = "BoundState3D"
    RG_SUBTRACTED = "RGSubtracted"
    FINITE_2D = "Finite2D"


@dataclass(frozen=True)
class UnitsConfig:
    """Physical units of a scenario; canonical units are hbar = 1, mass = 1/2"""
    hbar: float = 1.0
    mass: float = 0.5

    def __post_init__(self):
        if not self.hbar > 0:
            raise SchemaError(f"hbar must be positive, got {self.hbar}", field="units.hbar")
        if not self.mass > 0:
            raise SchemaError(f"mass must be positive, got {self.mass}", field="units.mass")

    @property
    def energy_scale(self) -> float:
        """hbar^2 / 2m, the energy that equals 1 in canonical units"""
        return self.hbar ** 2 / (2.0 * self.mass)

    def energy_to_canonical(self, energy: float) -> float:
        return energy / self.energy_scale

    def energy_from_canonical(self, energy: float) -> float:
        return energy * self.energy_scale

    def coupling_to_canonical(self, coupling: float) -> float:
        return coupling / self.energy_scale

    def coupling_from_canonical(self, coupling: float) -> float:
        return coupling * self.energy_scale

    def inverse_coupling_to_canonical(self, inverse_coupling: float) -> float:
        return inverse_coupling * self.energy_scale

    def inverse_coupling_from_canonical(self, inverse_coupling: float) -> float:
        return inverse_coupling / self.energy_scale

    def phi_from_canonical(self, value: float) -> float:
        # Phi has units of an inverse coupling
        return value / self.energy_scale


@dataclass
class QuadratureReport:
    """Node counts and error estimates of one principal-matrix assembly"""
    nodes: List[int]
    panel_order: int
    panels: int
    innermost_panel: float
    offdiag_error: Dict[str, float] = field(default_factory=dict)
    estimated_error: float = 0.0
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {
            "nodes": list(self.nodes),
            "panel_order": self.panel_order,
            "panels": self.panels,
            "innermost_panel": self.innermost_panel,
            "offdiag_error": dict(self.offdiag_error),
            "estimated_error": self.estimated_error,
            "warnings": list(self.warnings),
        }


@dataclass
class CheckResult:
    """Outcome of a single invariant check"""
    name: str
    passed: bool
    detail: str = ""
    elapsed: float = 0.0
    error: Optional[str] = None
