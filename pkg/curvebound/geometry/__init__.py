# geometry/__init__.py

from typing import Any, Dict, Optional

from ..config.settings import GeometryConfig, QuadratureConfig
from ..errors import SchemaError
from ..types.common import ManifoldKind
from .base import Manifold, RadialManifold
from .euclidean import EuclideanPlane, EuclideanSpace3
from .hyperbolic import HyperbolicSpace3
from .torus import FlatTorus3


def create_manifold(
    spec: Dict[str, Any],
    geometry: Optional[GeometryConfig] = None,
    quadrature: Optional[QuadratureConfig] = None,
) -> Manifold:
    """Build a manifold backend from its scenario description"""
    kind_name = spec.get("kind")
    try:
        kind = ManifoldKind(kind_name)
    except ValueError:
        allowed = ", ".join(k.value for k in ManifoldKind)
        raise SchemaError(f"unknown manifold kind {kind_name!r} (expected one of {allowed})",
                          field="manifold.kind")

    if kind is ManifoldKind.EUCLIDEAN_PLANE:
        return EuclideanPlane(geometry, quadrature)
    if kind is ManifoldKind.EUCLIDEAN_SPACE3:
        return EuclideanSpace3(geometry, quadrature)
    if kind is ManifoldKind.FLAT_TORUS3:
        if "periods" not in spec:
            raise SchemaError("FlatTorus3 needs periods", field="manifold.periods")
        return FlatTorus3(spec["periods"], geometry, quadrature)
    return HyperbolicSpace3(float(spec.get("curvature_scale", 1.0)), geometry, quadrature)


__all__ = [
    "EuclideanPlane",
    "EuclideanSpace3",
    "FlatTorus3",
    "HyperbolicSpace3",
    "Manifold",
    "RadialManifold",
    "create_manifold",
]
