# curves/curve.py

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..config.settings import QuadratureConfig
from ..errors import DomainError, GeometryViolationError, SchemaError
from ..geometry.base import Manifold
from ..types.common import ManifoldKind
from .parametrization import TWO_PI, Parametrization, ScaledParametrization, SplineParametrization
from .specs import CurveSpec

logger = logging.getLogger(__name__)

MIN_NODES = 32
ARCLENGTH_TOL = 1e-6
_NEWTON_STEPS = 30


@dataclass(frozen=True)
class CurveFrenetData:
    """Frenet frame and curvatures at the arclength nodes.

    Frames are stored as chart vectors that are orthonormal in the Euclidean
    sense; for a conformally flat metric lambda^2 |dx|^2 the metric-unit
    vectors are these divided by lambda.
    """
    kappa_g: np.ndarray
    kappa_g_max: float
    tau: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    binormals: Optional[np.ndarray]

    def orthonormality_error(self) -> float:
        frames = [self.tangents, self.normals]
        if self.binormals is not None:
            frames.append(self.binormals)
        stacked = np.stack(frames, axis=1)  # (n, k, d)
        gram = np.einsum("nkd,nld->nkl", stacked, stacked)
        return float(np.max(np.abs(gram - np.eye(len(frames)))))


@dataclass(frozen=True)
class SelfGapCertificate:
    """Near/far split of a curve's self-distance.

    For node pairs at arclength separation xi <= delta,
    factor * xi <= d_g <= xi with factor = sqrt(1 - kappa_g_max * delta);
    beyond delta, d_g >= Delta.
    """
    delta: float
    Delta: float
    factor: float
    kappa_g_max: float
    min_ratio: float
    node_spacing: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "delta": self.delta,
            "Delta": self.Delta,
            "factor": self.factor,
            "kappa_g_max": self.kappa_g_max,
            "min_ratio": self.min_ratio,
            "node_spacing": self.node_spacing,
        }


class Curve:
    """Closed curve reparametrized by metric arclength s in [0, L)"""

    def __init__(
        self,
        parametrization: Parametrization,
        manifold: Manifold,
        nodes: int,
        spec: Optional[CurveSpec] = None,
        config: Optional[QuadratureConfig] = None,
    ):
        if nodes < MIN_NODES:
            raise SchemaError(f"curves need at least {MIN_NODES} nodes, got {nodes}", field="quadrature.nodes")
        if parametrization.dimension != manifold.dimension:
            raise SchemaError(
                f"curve has {parametrization.dimension} coordinates but the manifold has dimension "
                f"{manifold.dimension}"
            )
        self.parametrization = parametrization
        self.manifold = manifold
        self.nodes = int(nodes)
        self.spec = spec
        self.config = config or QuadratureConfig()
        self.warnings: List[str] = []
        self._stencils: Dict[Tuple[Any, ...], Any] = {}

        self._build_arclength_table()
        self.node_s = np.arange(self.nodes) * (self.length / self.nodes)
        self.node_phi = self.phi_of_s(self.node_s)
        # nodes live in the fundamental domain; eval keeps the unwrapped chart position
        self.points = manifold.reduce(manifold.validate_points(parametrization.position(self.node_phi)))
        self.frenet = self._frenet_data()
        self.arclength_error = self._arclength_error()
        if self.arclength_error > ARCLENGTH_TOL:
            self._warn(f"arclength parametrization error {self.arclength_error:.2e} exceeds {ARCLENGTH_TOL:g}")
        self.parametrization_error = (
            parametrization.interpolation_error()
            if isinstance(parametrization, SplineParametrization) else 0.0
        )

    def _warn(self, message: str) -> None:
        logger.warning(message)
        self.warnings.append(message)

    @property
    def node_spacing(self) -> float:
        return self.length / self.nodes

    # Arclength map

    def _speed(self, phi: np.ndarray) -> np.ndarray:
        pos = self.parametrization.position(phi)
        return self.manifold.conformal_factor(pos) * np.linalg.norm(self.parametrization.first(phi), axis=-1)

    def _build_arclength_table(self) -> None:
        panels = self.config.arclength_panels
        order = self.config.panel_order
        x, w = np.polynomial.legendre.leggauss(order)
        self._gl = (x, w)
        self._phi_edges = np.linspace(0.0, TWO_PI, panels + 1)
        width = TWO_PI / panels
        mids = 0.5 * (self._phi_edges[:-1] + self._phi_edges[1:])
        phi = mids[:, None] + 0.5 * width * x[None, :]
        pieces = 0.5 * width * (self._speed(phi) @ w)
        self._s_edges = np.concatenate([[0.0], np.cumsum(pieces)])
        self.length = float(self._s_edges[-1])
        if not self.length > 0:
            raise GeometryViolationError("curve has zero length")

    def s_of_phi(self, phi: np.ndarray) -> np.ndarray:
        phi = np.clip(np.asarray(phi, dtype=float), 0.0, TWO_PI)
        panels = self._phi_edges.size - 1
        width = TWO_PI / panels
        k = np.minimum((phi / width).astype(int), panels - 1)
        start = np.asarray(self._phi_edges[k])
        half = np.asarray(0.5 * (phi - start))
        x, w = self._gl
        inner = start[..., None] + half[..., None] * (x + 1.0)
        return self._s_edges[k] + half * (self._speed(inner) @ w)

    def phi_of_s(self, s: np.ndarray) -> np.ndarray:
        """Inverse arclength map for s in [0, L)"""
        s = np.mod(np.asarray(s, dtype=float), self.length)
        if self.parametrization.uniform_speed:
            return TWO_PI * s / self.length
        phi = np.interp(s, self._s_edges, self._phi_edges)
        for _ in range(_NEWTON_STEPS):
            step = (self.s_of_phi(phi) - s) / self._speed(phi)
            phi = np.clip(phi - step, 0.0, TWO_PI)
            if np.max(np.abs(step), initial=0.0) < 1e-15 * TWO_PI:
                break
        return phi

    # Evaluation

    def eval(self, s: Any) -> np.ndarray:
        """gamma(s) with periodic extension"""
        return self.parametrization.position(self.phi_of_s(s))

    def derivatives(self, s: Any) -> Tuple[np.ndarray, np.ndarray]:
        """First and second arclength derivatives in chart components"""
        phi = self.phi_of_s(s)
        par = self.parametrization
        pos = par.position(phi)
        d1 = par.first(phi)
        d2 = par.second(phi)
        lam = self.manifold.conformal_factor(pos)[..., None]
        grad_f = self.manifold.log_conformal_gradient(pos)
        norm1 = np.linalg.norm(d1, axis=-1, keepdims=True)
        speed = lam * norm1
        d_speed = lam * (np.sum(grad_f * d1, axis=-1, keepdims=True) * norm1
                         + np.sum(d1 * d2, axis=-1, keepdims=True) / norm1)
        first = d1 / speed
        second = d2 / speed ** 2 - d1 * d_speed / speed ** 3
        return first, second

    def _christoffel(self, grad_f: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Gamma(v, w) for the metric e^{2f} |dx|^2"""
        fv = np.sum(grad_f * v, axis=-1, keepdims=True)
        fw = np.sum(grad_f * w, axis=-1, keepdims=True)
        vw = np.sum(v * w, axis=-1, keepdims=True)
        return v * fw + w * fv - vw * grad_f

    def _frenet_data(self) -> CurveFrenetData:
        v, dv = self.derivatives(self.node_s)
        pos = self.points
        lam = self.manifold.conformal_factor(pos)[..., None]
        grad_f = self.manifold.log_conformal_gradient(pos)
        accel = dv + self._christoffel(grad_f, v, v)
        accel_norm = np.linalg.norm(accel, axis=-1)
        kappa = lam[:, 0] * accel_norm
        tangents = lam * v
        tangents = tangents / np.linalg.norm(tangents, axis=-1, keepdims=True)

        normals = np.empty_like(tangents)
        curved = accel_norm > 1e-12 * max(1.0, float(np.max(accel_norm, initial=0.0)))
        normals[curved] = accel[curved] / accel_norm[curved, None]
        if np.any(~curved):
            normals[~curved] = _any_perpendicular(tangents[~curved])
        # remove roundoff drift against the tangent
        normals -= np.sum(normals * tangents, axis=-1, keepdims=True) * tangents
        normals /= np.linalg.norm(normals, axis=-1, keepdims=True)

        if self.manifold.dimension == 3:
            binormals = np.cross(tangents, normals)
            n_metric = normals / lam
            dn = _spectral_derivative(n_metric, self.length)
            cov = dn + self._christoffel(grad_f, v, n_metric)
            tau = lam[:, 0] * np.sum(cov * binormals, axis=-1)
        else:
            binormals = None
            tau = np.zeros(self.nodes)

        return CurveFrenetData(
            kappa_g=kappa,
            kappa_g_max=float(np.max(kappa)),
            tau=tau,
            tangents=tangents,
            normals=normals,
            binormals=binormals,
        )

    def _arclength_error(self) -> float:
        h = 1e-5 * self.length
        fwd = self.eval(self.node_s + h)
        back = self.eval(self.node_s - h)
        lam = self.manifold.conformal_factor(self.points)
        speed = lam * np.linalg.norm(fwd - back, axis=-1) / (2.0 * h)
        return float(np.max(np.abs(speed - 1.0)))

    @cached_property
    def self_gap(self) -> SelfGapCertificate:
        from .certificates import self_gap

        return self_gap(self)

    def scaled(self, factor: float) -> "Curve":
        """The curve under the chart scaling x -> factor * x (Euclidean manifolds only)"""
        if factor == 1.0:
            return self
        if not factor > 0:
            raise DomainError(f"scale factor must be positive, got {factor}")
        if self.manifold.kind not in (ManifoldKind.EUCLIDEAN_PLANE, ManifoldKind.EUCLIDEAN_SPACE3):
            raise DomainError(f"coordinate scaling is a metric scaling only in flat space, not {self.manifold.kind.value}")
        return Curve(ScaledParametrization(self.parametrization, factor), self.manifold, self.nodes,
                     spec=self.spec, config=self.config)

    def describe(self) -> Dict[str, Any]:
        info: Dict[str, Any] = {
            "length": self.length,
            "nodes": self.nodes,
            "kappa_g_max": self.frenet.kappa_g_max,
            "arclength_error": self.arclength_error,
            "parametrization_error": self.parametrization_error,
            "self_gap": self.self_gap.to_dict(),
        }
        if self.spec is not None:
            info["spec"] = self.spec.to_dict()
        return info


def _any_perpendicular(tangents: np.ndarray) -> np.ndarray:
    d = tangents.shape[-1]
    if d == 2:
        return np.stack([-tangents[:, 1], tangents[:, 0]], axis=-1)
    helper = np.zeros_like(tangents)
    helper[np.arange(tangents.shape[0]), np.argmin(np.abs(tangents), axis=-1)] = 1.0
    perp = helper - np.sum(helper * tangents, axis=-1, keepdims=True) * tangents
    return perp / np.linalg.norm(perp, axis=-1, keepdims=True)


def _spectral_derivative(samples: np.ndarray, length: float) -> np.ndarray:
    """d/ds of periodic samples on a uniform grid, column by column"""
    n = samples.shape[0]
    k = 2.0 * math.pi * np.fft.fftfreq(n, d=length / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    return np.real(np.fft.ifft(1j * k[:, None] * np.fft.fft(samples, axis=0), axis=0))


def build_curve(
    spec: CurveSpec,
    manifold: Manifold,
    nodes: int,
    config: Optional[QuadratureConfig] = None,
) -> Curve:
    """Build, validate and certify a curve on a manifold"""
    spec.check_manifold(manifold.kind)
    curve = Curve(spec.parametrization(), manifold, nodes, spec=spec, config=config)
    certificate = curve.self_gap
    logger.debug(
        f"Built {spec.kind.value} with L={curve.length:.12g}, kappa_g*={curve.frenet.kappa_g_max:.6g}, "
        f"delta={certificate.delta:.6g}, Delta={certificate.Delta:.6g}"
    )
    return curve
