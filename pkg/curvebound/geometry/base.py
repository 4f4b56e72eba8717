# geometry/base.py

import logging
import math
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

import numpy as np
from scipy.integrate import trapezoid

from ..config.settings import GeometryConfig, QuadratureConfig
from ..errors import CoincidenceError, DomainError, InvalidPointError
from ..types.common import ManifoldKind

logger = logging.getLogger(__name__)

# Upper end of the log-time grid sits where exp(-a t) has dropped to exp(-45)
_TIME_DECADES_HI = 45.0
# Lower end sits where exp(-r^2 / 4t) has dropped to exp(-40)
_GAUSSIAN_CUT = 160.0


class Manifold(ABC):
    """Base class for all ambient geometries.

    Points are numpy arrays whose last axis holds chart coordinates; every
    kernel method broadcasts over the leading axes of ``x`` and ``y``.
    Kernels are in canonical units (hbar = 1, mass = 1/2).
    """

    kind: ManifoldKind
    dimension: int

    def __init__(
        self,
        geometry: Optional[GeometryConfig] = None,
        quadrature: Optional[QuadratureConfig] = None,
    ):
        self.geometry = geometry or GeometryConfig()
        self.quadrature = quadrature or QuadratureConfig()

    @property
    def volume(self) -> float:
        return math.inf

    @property
    def is_flat(self) -> bool:
        return False

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "dimension": self.dimension}

    def validate_points(self, points: Any) -> np.ndarray:
        """Return points as a float array, raising on anything outside the chart"""
        arr = np.asarray(points, dtype=float)
        if arr.ndim == 0 or arr.shape[-1] != self.dimension:
            raise InvalidPointError(
                f"expected points with {self.dimension} coordinates, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise InvalidPointError("point coordinates must be finite")
        self._check_chart(arr)
        return arr

    def _check_chart(self, points: np.ndarray) -> None:
        pass

    def reduce(self, points: np.ndarray) -> np.ndarray:
        return points

    def conformal_factor(self, points: np.ndarray) -> np.ndarray:
        """lambda(x) with metric lambda(x)^2 |dx|^2 in the chart"""
        return np.ones(np.shape(points)[:-1])

    def log_conformal_gradient(self, points: np.ndarray) -> np.ndarray:
        """Chart gradient of log lambda"""
        return np.zeros(np.shape(points))

    @abstractmethod
    def geodesic_distance(self, x: Any, y: Any) -> np.ndarray:
        """Geodesic distance between points"""
        pass

    @abstractmethod
    def heat_kernel(self, t: float, x: Any, y: Any) -> np.ndarray:
        """K_t(x, y)"""
        pass

    @abstractmethod
    def resolvent_kernel(self, kappa: float, x: Any, y: Any) -> np.ndarray:
        """G_kappa(x, y) = int_0^inf e^{-kappa^2 t} K_t(x, y) dt for x != y"""
        pass

    @abstractmethod
    def resolvent_difference(self, nu: float, kappa: float, x: Any, y: Any) -> np.ndarray:
        """G_nu - G_kappa, finite at coincidence in dimension 3 and 2"""
        pass

    @abstractmethod
    def resolvent_derivative(self, kappa: float, x: Any, y: Any) -> np.ndarray:
        """dG/dE at E = -kappa^2, i.e. int_0^inf t e^{-kappa^2 t} K_t dt"""
        pass

    @abstractmethod
    def cutoff_resolvent(self, eps: float, a: float, x: Any, y: Any) -> np.ndarray:
        """int_eps^inf e^{-a t} K_t(x, y) dt"""
        pass

    @abstractmethod
    def cutoff_derivative(self, eps: float, a: float, x: Any, y: Any) -> np.ndarray:
        """int_eps^inf t e^{-a t} K_t(x, y) dt"""
        pass


def _positive(name: str, value: float) -> float:
    if not value > 0 or not math.isfinite(value):
        raise DomainError(f"{name} must be positive and finite, got {value}")
    return float(value)


class RadialManifold(Manifold):
    """Manifold whose heat kernel depends on the geodesic distance alone.

    Subclasses supply ``_heat_radial``; every resolvent-type kernel falls back
    to a trapezoid rule in u = log t unless the subclass has a closed form.
    """

    @abstractmethod
    def _heat_radial(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        pass

    def _distance(self, x: Any, y: Any) -> np.ndarray:
        return self.geodesic_distance(x, y)

    def heat_kernel(self, t: float, x: Any, y: Any) -> np.ndarray:
        if not t > 0:
            raise DomainError(f"heat kernel time must be positive, got {t}")
        return self._heat_radial(np.asarray(t, dtype=float), self._distance(x, y))

    def resolvent_kernel(self, kappa: float, x: Any, y: Any) -> np.ndarray:
        kappa = _positive("kappa", kappa)
        r = self._distance(x, y)
        if np.any(r == 0):
            raise CoincidenceError("resolvent kernel is singular at coinciding points")
        return self._resolvent_radial(kappa, r)

    def resolvent_difference(self, nu: float, kappa: float, x: Any, y: Any) -> np.ndarray:
        return self._difference_radial(_positive("nu", nu), _positive("kappa", kappa), self._distance(x, y))

    def resolvent_derivative(self, kappa: float, x: Any, y: Any) -> np.ndarray:
        return self._derivative_radial(_positive("kappa", kappa), self._distance(x, y))

    def cutoff_resolvent(self, eps: float, a: float, x: Any, y: Any) -> np.ndarray:
        return self._cutoff_radial(_positive("eps", eps), _positive("a", a), self._distance(x, y))

    def cutoff_derivative(self, eps: float, a: float, x: Any, y: Any) -> np.ndarray:
        return self._cutoff_derivative_radial(_positive("eps", eps), _positive("a", a), self._distance(x, y))

    # Radial forms; overridden where closed forms exist

    def _resolvent_radial(self, kappa: float, r: np.ndarray) -> np.ndarray:
        return self._time_integral(r, kappa * kappa)

    def _difference_radial(self, nu: float, kappa: float, r: np.ndarray) -> np.ndarray:
        return self._time_integral(r, nu * nu, b=kappa * kappa)

    def _derivative_radial(self, kappa: float, r: np.ndarray) -> np.ndarray:
        return self._time_integral(r, kappa * kappa, moment=1)

    def _cutoff_radial(self, eps: float, a: float, r: np.ndarray) -> np.ndarray:
        return self._time_integral(r, a, eps=eps)

    def _cutoff_derivative_radial(self, eps: float, a: float, r: np.ndarray) -> np.ndarray:
        return self._time_integral(r, a, eps=eps, moment=1)

    def _time_integral(
        self,
        r: Any,
        a: float,
        eps: float = 0.0,
        b: Optional[float] = None,
        moment: int = 0,
    ) -> np.ndarray:
        """int_eps^inf t^moment (e^{-a t} - e^{-b t}) K_t(r) dt.

        Trapezoid rule in u with t = eps + e^u; the integrand decays doubly
        exponentially at both ends, so the rule converges exponentially in
        the step.
        """
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        out = np.empty_like(flat)
        step = self.quadrature.log_time_step
        a_min = a if b is None else min(a, b)
        u_hi = math.log((_TIME_DECADES_HI + 5.0 * moment) / a_min)

        n_chunk = max(1, self.quadrature.chunk_size)
        for start in range(0, flat.size, n_chunk):
            chunk = flat[start:start + n_chunk]
            if eps > 0:
                u_lo = math.log(1e-16 * eps)
            else:
                u_lo = math.log(max(float(chunk.min()) ** 2, 1e-40) / _GAUSSIAN_CUT)
            u = np.arange(u_lo, u_hi + step, step)
            jac = np.exp(u)
            t = eps + jac
            if b is None:
                weight = np.exp(-a * t)
            elif b >= a:
                weight = -np.exp(-a * t) * np.expm1(-(b - a) * t)
            else:
                weight = np.exp(-b * t) * np.expm1(-(a - b) * t)
            weight = weight * jac * t ** moment
            values = self._heat_radial(t[None, :], chunk[:, None]) * weight[None, :]
            out[start:start + n_chunk] = trapezoid(values, dx=step, axis=1)
        return out.reshape(r.shape)
