# geometry/torus.py

import itertools
import logging
import math
from functools import lru_cache
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

from ..config.settings import GeometryConfig, QuadratureConfig
from ..errors import CoincidenceError, DomainError, SchemaError, TruncationError
from ..types.common import ManifoldKind
from .base import Manifold, _positive
from .euclidean import EuclideanSpace3

logger = logging.getLogger(__name__)


@lru_cache(maxsize=128)
def _shell(n: int) -> np.ndarray:
    """Integer lattice vectors with max-norm exactly n"""
    if n == 0:
        return np.zeros((1, 3), dtype=int)
    rng = range(-n, n + 1)
    vectors = [v for v in itertools.product(rng, rng, rng) if max(abs(c) for c in v) == n]
    return np.array(vectors, dtype=int)


class FlatTorus3(Manifold):
    """R^3 modulo the lattice l1 Z x l2 Z x l3 Z.

    Kernels are image sums of the Euclidean kernels over lattice shells,
    truncated once a full shell adds less than image_rel_tol of the partial
    sum at every evaluation point.
    """

    kind = ManifoldKind.FLAT_TORUS3
    dimension = 3

    def __init__(
        self,
        periods: Sequence[float],
        geometry: Optional[GeometryConfig] = None,
        quadrature: Optional[QuadratureConfig] = None,
    ):
        super().__init__(geometry, quadrature)
        periods = tuple(float(p) for p in periods)
        if len(periods) != 3 or not all(p > 0 and math.isfinite(p) for p in periods):
            raise SchemaError(f"torus periods must be three positive reals, got {periods}",
                              field="manifold.periods")
        self.periods = np.array(periods)
        self._free = EuclideanSpace3(geometry, quadrature)

    @property
    def volume(self) -> float:
        return float(np.prod(self.periods))

    @property
    def is_flat(self) -> bool:
        return True

    def describe(self) -> Dict[str, Any]:
        info = super().describe()
        info["periods"] = [float(p) for p in self.periods]
        return info

    def reduce(self, points: np.ndarray) -> np.ndarray:
        """Representatives in [0, l_k); np.mod can round tiny negatives up to l_k"""
        reduced = np.mod(points, self.periods)
        return np.where(reduced >= self.periods, reduced - self.periods, reduced)

    def displacement(self, x: Any, y: Any) -> np.ndarray:
        """Minimal-image displacement y - x"""
        d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
        return d - self.periods * np.round(d / self.periods)

    def geodesic_distance(self, x: Any, y: Any) -> np.ndarray:
        return np.linalg.norm(self.displacement(self.validate_points(x), self.validate_points(y)), axis=-1)

    def image_sum(self, radial: Callable[[np.ndarray], np.ndarray], x: Any, y: Any) -> np.ndarray:
        """Sum of radial(|y - x + n l|) over lattice vectors n"""
        disp = self.displacement(self.validate_points(x), self.validate_points(y))
        shape = disp.shape[:-1]
        disp = disp.reshape(-1, 3)
        total = np.asarray(radial(np.linalg.norm(disp, axis=-1)), dtype=float)
        tol = self.geometry.image_rel_tol
        contribution = np.zeros_like(total)

        for n in range(1, self.geometry.max_shells + 1):
            shift = _shell(n) * self.periods
            contribution = np.zeros_like(total)
            block = max(1, self.quadrature.chunk_size // max(1, disp.shape[0]))
            for start in range(0, shift.shape[0], block):
                images = disp[:, None, :] + shift[None, start:start + block, :]
                contribution += radial(np.linalg.norm(images, axis=-1)).sum(axis=1)
            total = total + contribution
            if np.all(np.abs(contribution) <= tol * np.abs(total)):
                logger.debug(f"Image sum converged after {n} shells")
                return total.reshape(shape)

        tail = float(np.max(np.abs(contribution)))
        raise TruncationError(
            f"image sum did not converge within {self.geometry.max_shells} shells "
            f"(last shell contributed {tail:.3e})",
            tail_bound=tail,
        )

    def heat_kernel(self, t: float, x: Any, y: Any) -> np.ndarray:
        if not t > 0:
            raise DomainError(f"heat kernel time must be positive, got {t}")
        return self.image_sum(lambda r: self._free._heat_radial(np.asarray(t), r), x, y)

    def resolvent_kernel(self, kappa: float, x: Any, y: Any) -> np.ndarray:
        kappa = _positive("kappa", kappa)
        if np.any(self.geodesic_distance(x, y) == 0):
            raise CoincidenceError("resolvent kernel is singular at coinciding points")
        return self.image_sum(lambda r: self._free._resolvent_radial(kappa, r), x, y)

    def resolvent_difference(self, nu: float, kappa: float, x: Any, y: Any) -> np.ndarray:
        nu = _positive("nu", nu)
        kappa = _positive("kappa", kappa)
        return self.image_sum(lambda r: self._free._difference_radial(nu, kappa, r), x, y)

    def resolvent_derivative(self, kappa: float, x: Any, y: Any) -> np.ndarray:
        kappa = _positive("kappa", kappa)
        return self.image_sum(lambda r: self._free._derivative_radial(kappa, r), x, y)

    def cutoff_resolvent(self, eps: float, a: float, x: Any, y: Any) -> np.ndarray:
        eps = _positive("eps", eps)
        a = _positive("a", a)
        return self.image_sum(lambda r: self._free._cutoff_radial(eps, a, r), x, y)

    def cutoff_derivative(self, eps: float, a: float, x: Any, y: Any) -> np.ndarray:
        eps = _positive("eps", eps)
        a = _positive("a", a)
        return self.image_sum(lambda r: self._free._cutoff_derivative_radial(eps, a, r), x, y)
