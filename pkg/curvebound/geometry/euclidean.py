# geometry/euclidean.py

import math
from typing import Any

import numpy as np
from scipy.special import erfc, erfcx, k0, k1

from ..types.common import ManifoldKind
from .base import RadialManifold

_FOUR_PI = 4.0 * math.pi
# Below this value of r / (2 sqrt(eps)) the cutoff resolvent uses its r^2 series
_SERIES_CUTOVER = 1e-3


class EuclideanManifold(RadialManifold):
    """Flat R^d in Cartesian coordinates"""

    @property
    def is_flat(self) -> bool:
        return True

    def geodesic_distance(self, x: Any, y: Any) -> np.ndarray:
        x = self.validate_points(x)
        y = self.validate_points(y)
        return np.linalg.norm(x - y, axis=-1)

    def _heat_radial(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        return (_FOUR_PI * t) ** (-0.5 * self.dimension) * np.exp(-(r * r) / (4.0 * t))


class EuclideanPlane(EuclideanManifold):
    kind = ManifoldKind.EUCLIDEAN_PLANE
    dimension = 2

    def _resolvent_radial(self, kappa: float, r: np.ndarray) -> np.ndarray:
        return k0(kappa * r) / (2.0 * math.pi)

    def _difference_radial(self, nu: float, kappa: float, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        at_zero = r == 0
        safe = np.where(at_zero, 1.0, r)
        value = (k0(nu * safe) - k0(kappa * safe)) / (2.0 * math.pi)
        return np.where(at_zero, math.log(kappa / nu) / (2.0 * math.pi), value)

    def _derivative_radial(self, kappa: float, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        at_zero = r == 0
        safe = np.where(at_zero, 1.0, r)
        value = safe * k1(kappa * safe) / (_FOUR_PI * kappa)
        return np.where(at_zero, 1.0 / (_FOUR_PI * kappa * kappa), value)


class EuclideanSpace3(EuclideanManifold):
    kind = ManifoldKind.EUCLIDEAN_SPACE3
    dimension = 3

    def _resolvent_radial(self, kappa: float, r: np.ndarray) -> np.ndarray:
        return np.exp(-kappa * r) / (_FOUR_PI * r)

    def _difference_radial(self, nu: float, kappa: float, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        at_zero = r == 0
        safe = np.where(at_zero, 1.0, r)
        value = -np.exp(-nu * safe) * np.expm1(-(kappa - nu) * safe) / (_FOUR_PI * safe)
        return np.where(at_zero, (kappa - nu) / _FOUR_PI, value)

    def _derivative_radial(self, kappa: float, r: np.ndarray) -> np.ndarray:
        return np.exp(-kappa * np.asarray(r, dtype=float)) / (2.0 * _FOUR_PI * kappa)

    def _cutoff_radial(self, eps: float, a: float, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        shape = r.shape
        r = r.ravel()
        sqrt_a = math.sqrt(a)
        sqrt_eps = math.sqrt(eps)
        x = a * eps
        u = r / (2.0 * sqrt_eps)
        v = math.sqrt(x)

        # Incomplete gamma values scaled by e^{x}:
        #   Gamma(-1/2, x) = 2 x^{-1/2} e^{-x} - 2 sqrt(pi) erfc(sqrt x)
        #   Gamma(-3/2, x) = (2/3) (x^{-3/2} e^{-x} - Gamma(-1/2, x))
        g_half = 2.0 / v - 2.0 * math.sqrt(math.pi) * erfcx(v)
        g_three_halves = (2.0 / 3.0) * (x ** -1.5 - g_half)
        norm = _FOUR_PI ** -1.5 * math.exp(-x)
        f0 = norm * sqrt_a * g_half
        c2 = -0.25 * norm * a ** 1.5 * g_three_halves

        small = u < _SERIES_CUTOVER
        out = np.empty_like(r)
        out[small] = f0 + c2 * r[small] ** 2

        rb = r[~small]
        ub = u[~small]
        damp = np.exp(-x - ub * ub)
        lower = v - ub
        term1 = np.where(
            lower >= 0,
            erfcx(np.maximum(lower, 0.0)) * damp,
            np.exp(-sqrt_a * rb) * erfc(np.minimum(lower, 0.0)),
        )
        term2 = erfcx(v + ub) * damp
        out[~small] = (term1 - term2) / (2.0 * _FOUR_PI * rb)
        return out.reshape(shape)
