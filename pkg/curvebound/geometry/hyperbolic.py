# geometry/hyperbolic.py

import math
from typing import Any, Dict, Optional

import numpy as np

from ..config.settings import GeometryConfig, QuadratureConfig
from ..errors import InvalidPointError, SchemaError
from ..types.common import ManifoldKind
from .base import RadialManifold


def _x_over_sinh(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    with np.errstate(over="ignore"):
        value = safe / np.sinh(safe)
    return np.where(small, 1.0 - x * x / 6.0, value)


class HyperbolicSpace3(RadialManifold):
    """Hyperbolic 3-space of curvature -1/R^2 in upper half-space coordinates.

    Points are (x, y, z) with z > 0 and metric (R^2 / z^2) |dx|^2.
    Resolvent-type kernels come from the log-time quadrature of the heat
    kernel.
    """

    kind = ManifoldKind.HYPERBOLIC_SPACE3
    dimension = 3
    chart = "upper-half-space"

    def __init__(
        self,
        curvature_scale: float = 1.0,
        geometry: Optional[GeometryConfig] = None,
        quadrature: Optional[QuadratureConfig] = None,
    ):
        super().__init__(geometry, quadrature)
        if not curvature_scale > 0 or not math.isfinite(curvature_scale):
            raise SchemaError(f"curvature_scale must be positive, got {curvature_scale}",
                              field="manifold.curvature_scale")
        self.curvature_scale = float(curvature_scale)

    def describe(self) -> Dict[str, Any]:
        info = super().describe()
        info["curvature_scale"] = self.curvature_scale
        info["chart"] = self.chart
        return info

    def _check_chart(self, points: np.ndarray) -> None:
        if np.any(points[..., 2] <= 0):
            raise InvalidPointError("upper half-space points need height z > 0")

    def conformal_factor(self, points: np.ndarray) -> np.ndarray:
        return self.curvature_scale / np.asarray(points)[..., 2]

    def log_conformal_gradient(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        grad = np.zeros_like(points)
        grad[..., 2] = -1.0 / points[..., 2]
        return grad

    def geodesic_distance(self, x: Any, y: Any) -> np.ndarray:
        x = self.validate_points(x)
        y = self.validate_points(y)
        chord = np.linalg.norm(x - y, axis=-1)
        # cosh(d/R) = 1 + |x-y|^2 / (2 z_x z_y), written to stay accurate for small d
        return 2.0 * self.curvature_scale * np.arcsinh(chord / (2.0 * np.sqrt(x[..., 2] * y[..., 2])))

    def _heat_radial(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        R = self.curvature_scale
        return (
            (4.0 * math.pi * t) ** -1.5
            * _x_over_sinh(r / R)
            * np.exp(-t / (R * R) - (r * r) / (4.0 * t))
        )
