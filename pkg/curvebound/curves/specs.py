# curves/specs.py

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..errors import ClosureError, GeometryViolationError, SchemaError
from ..types.common import CurveKind, ManifoldKind
from .parametrization import (
    EllipseParametrization,
    Parametrization,
    SplineParametrization,
    TorusKnotParametrization,
    plane_basis,
)

_SPACE_KINDS = (ManifoldKind.EUCLIDEAN_SPACE3, ManifoldKind.FLAT_TORUS3)
MIN_SAMPLED_POINTS = 16


def _require_positive(name: str, value: float, prefix: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0 or not math.isfinite(value):
        raise SchemaError(f"must be a positive number, got {value!r}", field=f"{prefix}.{name}")
    return float(value)


def _vector(name: str, value: Any, length: int, prefix: str) -> Tuple[float, ...]:
    try:
        vec = tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise SchemaError(f"expected {length} numbers, got {value!r}", field=f"{prefix}.{name}")
    if len(vec) != length or not all(math.isfinite(v) for v in vec):
        raise SchemaError(f"expected {length} finite numbers, got {value!r}", field=f"{prefix}.{name}")
    return vec


@dataclass(frozen=True)
class CurveSpec:
    """Description of one closed curve"""
    kind: CurveKind
    manifolds: Tuple[ManifoldKind, ...] = field(default=(), repr=False)

    def check_manifold(self, manifold_kind: ManifoldKind) -> None:
        if self.manifolds and manifold_kind not in self.manifolds:
            allowed = ", ".join(k.value for k in self.manifolds)
            raise SchemaError(f"{self.kind.value} lives on {allowed}, not {manifold_kind.value}")

    def parametrization(self) -> Parametrization:
        raise NotImplementedError

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Circle3(CurveSpec):
    radius: float = 1.0
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    normal: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    kind: CurveKind = CurveKind.CIRCLE3
    manifolds: Tuple[ManifoldKind, ...] = field(default=_SPACE_KINDS, repr=False)

    def parametrization(self) -> Parametrization:
        e1, e2 = plane_basis(self.normal)
        return EllipseParametrization(self.radius, self.radius, self.center, e1, e2)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "radius": self.radius, "center": list(self.center),
                "normal": list(self.normal)}


@dataclass(frozen=True)
class Ellipse3(CurveSpec):
    a: float = 2.0
    b: float = 1.0
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    normal: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    major_axis: Optional[Tuple[float, float, float]] = None
    kind: CurveKind = CurveKind.ELLIPSE3
    manifolds: Tuple[ManifoldKind, ...] = field(default=_SPACE_KINDS, repr=False)

    def parametrization(self) -> Parametrization:
        e1, e2 = plane_basis(self.normal, self.major_axis)
        return EllipseParametrization(self.a, self.b, self.center, e1, e2)

    def to_dict(self) -> Dict[str, Any]:
        info = {"kind": self.kind.value, "a": self.a, "b": self.b, "center": list(self.center),
                "normal": list(self.normal)}
        if self.major_axis is not None:
            info["major_axis"] = list(self.major_axis)
        return info


@dataclass(frozen=True)
class TorusKnot(CurveSpec):
    p: int = 2
    q: int = 3
    major: float = 2.0
    minor: float = 0.5
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    kind: CurveKind = CurveKind.TORUS_KNOT
    manifolds: Tuple[ManifoldKind, ...] = field(default=_SPACE_KINDS, repr=False)

    def parametrization(self) -> Parametrization:
        return TorusKnotParametrization(self.p, self.q, self.major, self.minor, self.center)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "p": self.p, "q": self.q, "major": self.major,
                "minor": self.minor, "center": list(self.center)}


@dataclass(frozen=True)
class Circle2(CurveSpec):
    radius: float = 1.0
    center: Tuple[float, float] = (0.0, 0.0)
    kind: CurveKind = CurveKind.CIRCLE2
    manifolds: Tuple[ManifoldKind, ...] = field(default=(ManifoldKind.EUCLIDEAN_PLANE,), repr=False)

    def parametrization(self) -> Parametrization:
        return EllipseParametrization(self.radius, self.radius, self.center,
                                      np.array([1.0, 0.0]), np.array([0.0, 1.0]))

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "radius": self.radius, "center": list(self.center)}


@dataclass(frozen=True)
class CircleH3(CurveSpec):
    """Geodesic circle of hyperbolic radius `radius` about `center` = (x0, y0, h)"""
    radius: float = 1.0
    center: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    curvature_scale: float = 1.0
    kind: CurveKind = CurveKind.CIRCLE_H3
    manifolds: Tuple[ManifoldKind, ...] = field(default=(ManifoldKind.HYPERBOLIC_SPACE3,), repr=False)

    def parametrization(self) -> Parametrization:
        x0, y0, h = self.center
        ratio = self.radius / self.curvature_scale
        chart_radius = h * math.tanh(ratio)
        height = h / math.cosh(ratio)
        return EllipseParametrization(
            chart_radius, chart_radius, (x0, y0, height),
            np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), uniform_speed=True,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "radius": self.radius, "center": list(self.center)}


@dataclass(frozen=True)
class Sampled(CurveSpec):
    points: Tuple[Tuple[float, ...], ...] = ()
    kind: CurveKind = CurveKind.SAMPLED

    def validated_points(self) -> np.ndarray:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < MIN_SAMPLED_POINTS:
            raise SchemaError(f"a sampled curve needs at least {MIN_SAMPLED_POINTS} points, got {len(self.points)}")
        if not np.all(np.isfinite(pts)):
            raise SchemaError("sampled points must be finite")
        scale = float(np.max(np.ptp(pts, axis=0)))
        if np.linalg.norm(pts[-1] - pts[0]) <= 1e-12 * scale:
            pts = pts[:-1]
        segments = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if np.any(segments <= 1e-12 * scale):
            raise GeometryViolationError("sampled curve repeats a point")
        gap = float(np.linalg.norm(pts[-1] - pts[0]))
        if gap > 4.0 * float(segments.max()):
            raise ClosureError(
                f"sampled curve is not closed: closing gap {gap:.3e} exceeds "
                f"four times the longest segment {segments.max():.3e}"
            )
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        np.fill_diagonal(dist, np.inf)
        if np.min(dist) <= 1e-12 * scale:
            raise GeometryViolationError("sampled curve passes twice through the same point")
        return pts

    def parametrization(self) -> Parametrization:
        return SplineParametrization(self.validated_points())

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "points": [list(p) for p in self.points]}


def curve_spec_from_dict(data: Dict[str, Any], prefix: str = "curve",
                         curvature_scale: float = 1.0) -> CurveSpec:
    """Parse one curve entry of a scenario"""
    if not isinstance(data, dict):
        raise SchemaError("expected an object", field=prefix)
    try:
        kind = CurveKind(data.get("kind"))
    except ValueError:
        allowed = ", ".join(k.value for k in CurveKind)
        raise SchemaError(f"unknown curve kind {data.get('kind')!r} (expected one of {allowed})",
                          field=f"{prefix}.kind")

    if kind is CurveKind.CIRCLE3:
        return Circle3(
            radius=_require_positive("radius", data.get("radius"), prefix),
            center=_vector("center", data.get("center", (0, 0, 0)), 3, prefix),
            normal=_vector("normal", data.get("normal", (0, 0, 1)), 3, prefix),
        )
    if kind is CurveKind.ELLIPSE3:
        major = data.get("major_axis")
        return Ellipse3(
            a=_require_positive("a", data.get("a"), prefix),
            b=_require_positive("b", data.get("b"), prefix),
            center=_vector("center", data.get("center", (0, 0, 0)), 3, prefix),
            normal=_vector("normal", data.get("normal", (0, 0, 1)), 3, prefix),
            major_axis=None if major is None else _vector("major_axis", major, 3, prefix),
        )
    if kind is CurveKind.TORUS_KNOT:
        p, q = data.get("p"), data.get("q")
        for name, value in (("p", p), ("q", q)):
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise SchemaError(f"must be a positive integer, got {value!r}", field=f"{prefix}.{name}")
        if math.gcd(p, q) != 1:
            raise SchemaError(f"p and q must be coprime, got ({p}, {q})", field=f"{prefix}.p")
        major = _require_positive("major", data.get("major"), prefix)
        minor = _require_positive("minor", data.get("minor"), prefix)
        if not major > minor:
            raise SchemaError(f"major radius {major} must exceed minor radius {minor}", field=f"{prefix}.major")
        return TorusKnot(p=p, q=q, major=major, minor=minor,
                         center=_vector("center", data.get("center", (0, 0, 0)), 3, prefix))
    if kind is CurveKind.CIRCLE2:
        return Circle2(
            radius=_require_positive("radius", data.get("radius"), prefix),
            center=_vector("center", data.get("center", (0, 0)), 2, prefix),
        )
    if kind is CurveKind.CIRCLE_H3:
        center = _vector("center", data.get("center", (0, 0, 1)), 3, prefix)
        if not center[2] > 0:
            raise SchemaError(f"centre height must be positive, got {center[2]}", field=f"{prefix}.center")
        return CircleH3(radius=_require_positive("radius", data.get("radius"), prefix),
                        center=center, curvature_scale=curvature_scale)

    points = data.get("points")
    if not isinstance(points, list):
        raise SchemaError("expected a list of points (or a 'file' entry resolved beforehand)",
                          field=f"{prefix}.points")
    try:
        rows = tuple(tuple(float(c) for c in row) for row in points)
    except (TypeError, ValueError):
        raise SchemaError("points must be lists of numbers", field=f"{prefix}.points")
    return Sampled(points=rows)
