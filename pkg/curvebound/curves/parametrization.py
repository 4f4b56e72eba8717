# curves/parametrization.py

import math
from abc import ABC, abstractmethod
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import SchemaError

TWO_PI = 2.0 * math.pi


class Parametrization(ABC):
    """Closed curve phi -> gamma(phi) on [0, 2 pi) in chart coordinates"""

    dimension: int
    # True when the metric speed |gamma'(phi)|_g is constant in phi
    uniform_speed: bool = False

    @abstractmethod
    def position(self, phi: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def first(self, phi: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def second(self, phi: np.ndarray) -> np.ndarray:
        pass


def plane_basis(normal: Sequence[float], major_axis: Optional[Sequence[float]] = None):
    """Orthonormal (e1, e2) spanning the plane orthogonal to normal"""
    n = np.asarray(normal, dtype=float)
    length = np.linalg.norm(n)
    if n.shape != (3,) or not length > 0 or not np.isfinite(length):
        raise SchemaError(f"normal must be a non-zero 3-vector, got {normal}", field="normal")
    n = n / length
    if major_axis is None:
        helper = np.array([1.0, 0.0, 0.0])
        if abs(n @ helper) > 0.9:
            helper = np.array([0.0, 1.0, 0.0])
    else:
        helper = np.asarray(major_axis, dtype=float)
    e1 = helper - (helper @ n) * n
    norm = np.linalg.norm(e1)
    if norm < 1e-12:
        raise SchemaError(f"major axis {major_axis} is parallel to the normal {normal}", field="major_axis")
    e1 = e1 / norm
    e2 = np.cross(n, e1)
    return e1, e2


class EllipseParametrization(Parametrization):
    """center + a cos(phi) e1 + b sin(phi) e2; a circle when a == b"""

    def __init__(self, a: float, b: float, center: Sequence[float], e1: np.ndarray, e2: np.ndarray,
                 uniform_speed: Optional[bool] = None):
        self.a = float(a)
        self.b = float(b)
        self.center = np.asarray(center, dtype=float)
        self.e1 = np.asarray(e1, dtype=float)
        self.e2 = np.asarray(e2, dtype=float)
        self.dimension = self.center.shape[0]
        self.uniform_speed = (a == b) if uniform_speed is None else uniform_speed

    def position(self, phi):
        phi = np.asarray(phi, dtype=float)[..., None]
        return self.center + self.a * np.cos(phi) * self.e1 + self.b * np.sin(phi) * self.e2

    def first(self, phi):
        phi = np.asarray(phi, dtype=float)[..., None]
        return -self.a * np.sin(phi) * self.e1 + self.b * np.cos(phi) * self.e2

    def second(self, phi):
        phi = np.asarray(phi, dtype=float)[..., None]
        return -self.a * np.cos(phi) * self.e1 - self.b * np.sin(phi) * self.e2


class TorusKnotParametrization(Parametrization):
    """(p, q) torus knot on the torus of radii major > minor about the z-axis"""

    dimension = 3

    def __init__(self, p: int, q: int, major: float, minor: float, center: Sequence[float] = (0.0, 0.0, 0.0)):
        self.p = int(p)
        self.q = int(q)
        self.major = float(major)
        self.minor = float(minor)
        self.center = np.asarray(center, dtype=float)

    def _radial(self, phi):
        qphi = self.q * phi
        rho = self.major + self.minor * np.cos(qphi)
        d_rho = -self.minor * self.q * np.sin(qphi)
        dd_rho = -self.minor * self.q ** 2 * np.cos(qphi)
        return rho, d_rho, dd_rho

    def position(self, phi):
        phi = np.asarray(phi, dtype=float)
        rho, _, _ = self._radial(phi)
        pphi = self.p * phi
        xyz = np.stack([rho * np.cos(pphi), rho * np.sin(pphi), -self.minor * np.sin(self.q * phi)], axis=-1)
        return self.center + xyz

    def first(self, phi):
        phi = np.asarray(phi, dtype=float)
        rho, d_rho, _ = self._radial(phi)
        pphi = self.p * phi
        c, s = np.cos(pphi), np.sin(pphi)
        return np.stack([
            d_rho * c - self.p * rho * s,
            d_rho * s + self.p * rho * c,
            -self.minor * self.q * np.cos(self.q * phi),
        ], axis=-1)

    def second(self, phi):
        phi = np.asarray(phi, dtype=float)
        rho, d_rho, dd_rho = self._radial(phi)
        p = self.p
        pphi = p * phi
        c, s = np.cos(pphi), np.sin(pphi)
        return np.stack([
            dd_rho * c - 2 * p * d_rho * s - p * p * rho * c,
            dd_rho * s + 2 * p * d_rho * c - p * p * rho * s,
            self.minor * self.q ** 2 * np.sin(self.q * phi),
        ], axis=-1)


class SplineParametrization(Parametrization):
    """Periodic cubic spline through sampled points, parametrized by chord length"""

    def __init__(self, points: np.ndarray):
        points = np.asarray(points, dtype=float)
        self.dimension = points.shape[1]
        self.knots = self._chord_parameter(points)
        closed = np.vstack([points, points[:1]])
        self._spline = CubicSpline(np.append(self.knots, TWO_PI), closed, bc_type="periodic")
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)
        self.samples = points

    @staticmethod
    def _chord_parameter(points: np.ndarray) -> np.ndarray:
        closed = np.vstack([points, points[:1]])
        segments = np.linalg.norm(np.diff(closed, axis=0), axis=1)
        cumulative = np.concatenate([[0.0], np.cumsum(segments)])
        return TWO_PI * cumulative[:-1] / cumulative[-1]

    def position(self, phi):
        return self._spline(np.mod(phi, TWO_PI))

    def first(self, phi):
        return self._d1(np.mod(phi, TWO_PI))

    def second(self, phi):
        return self._d2(np.mod(phi, TWO_PI))

    def interpolation_error(self) -> float:
        """Deviation of the half-resolution spline from the dropped samples"""
        if self.samples.shape[0] < 16:
            return math.nan
        coarse = SplineParametrization(self.samples[::2])
        # Map the fine knots of the odd samples onto the coarse chord parameter
        fine_closed = np.vstack([self.samples, self.samples[:1]])
        segments = np.linalg.norm(np.diff(fine_closed, axis=0), axis=1)
        cumulative = np.concatenate([[0.0], np.cumsum(segments)])
        even = cumulative[:-1][::2]
        coarse_phi = np.interp(cumulative[:-1][1::2], np.append(even, cumulative[-1]),
                               np.append(coarse.knots, TWO_PI))
        return float(np.max(np.linalg.norm(coarse.position(coarse_phi) - self.samples[1::2], axis=1)))


class ScaledParametrization(Parametrization):
    """Chart scaling x -> factor * x of another parametrization"""

    def __init__(self, base: Parametrization, factor: float):
        self.base = base
        self.factor = float(factor)
        self.dimension = base.dimension
        self.uniform_speed = base.uniform_speed

    def position(self, phi):
        return self.factor * self.base.position(phi)

    def first(self, phi):
        return self.factor * self.base.first(phi)

    def second(self, phi):
        return self.factor * self.base.second(phi)
