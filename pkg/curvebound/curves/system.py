# curves/system.py

import logging
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from ..config.settings import CurveboundConfig
from ..errors import IntersectionError, SchemeError
from ..geometry.base import Manifold
from ..types.schemes import Scheme
from .curve import Curve

logger = logging.getLogger(__name__)

# Distances at or below this fraction of the longest curve count as contact
_CONTACT_FRACTION = 1e-9


class CurveSystem:
    """N disjoint curves on one manifold with a single active scheme"""

    def __init__(
        self,
        manifold: Manifold,
        curves: Sequence[Curve],
        scheme: Scheme,
        config: Optional[CurveboundConfig] = None,
    ):
        self.manifold = manifold
        self.curves: List[Curve] = list(curves)
        self.scheme = scheme
        self.config = config or CurveboundConfig()
        self.warnings: List[str] = []

        if not self.curves:
            raise SchemeError("a curve system needs at least one curve")
        for idx, curve in enumerate(self.curves):
            if curve.manifold is not manifold:
                raise SchemeError(f"curve {idx} was built on a different manifold")
        scheme.validate(manifold, len(self.curves))

        if len(self.curves) >= 2:
            self.distances = pairwise_distances(self)
        else:
            self.distances = np.full((1, 1), np.nan)

        for i in range(self.size):
            for j in range(i + 1, self.size):
                spacing = max(self.curves[i].node_spacing, self.curves[j].node_spacing)
                if self.distances[i, j] < 2.0 * spacing:
                    message = (
                        f"curves {i} and {j} are {self.distances[i, j]:.3e} apart, within twice the "
                        f"node spacing {spacing:.3e}; off-diagonal quadrature loses accuracy"
                    )
                    logger.warning(message)
                    self.warnings.append(message)

    @property
    def size(self) -> int:
        return len(self.curves)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([c.length for c in self.curves])

    def with_scheme(self, scheme: Scheme) -> "CurveSystem":
        """Same curves under another scheme; distances are reused"""
        other = CurveSystem.__new__(CurveSystem)
        other.manifold = self.manifold
        other.curves = self.curves
        other.scheme = scheme
        other.config = self.config
        other.warnings = list(self.warnings)
        other.distances = self.distances
        scheme.validate(self.manifold, self.size)
        return other


def _refine_distance(manifold: Manifold, a: Curve, b: Curve, s0: float, t0: float) -> float:
    def objective(x):
        return float(manifold.geodesic_distance(a.eval(x[0]), b.eval(x[1])))

    scale = min(a.node_spacing, b.node_spacing)
    result = minimize(
        objective,
        np.array([s0, t0]),
        method="Nelder-Mead",
        options={"xatol": 1e-12 * scale, "fatol": 1e-15, "initial_simplex": np.array([
            [s0, t0], [s0 + scale, t0], [s0, t0 + scale]]), "maxiter": 2000},
    )
    return float(result.fun)


def pairwise_distances(system: CurveSystem) -> np.ndarray:
    """Minimum geodesic distances d_ij between distinct curves; diagonal is NaN"""
    n = system.size
    if n < 2:
        raise SchemeError("pairwise distances need at least two curves")
    manifold = system.manifold
    dist = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = system.curves[i], system.curves[j]
            grid = manifold.geodesic_distance(a.points[:, None, :], b.points[None, :, :])
            ia, ib = np.unravel_index(np.argmin(grid), grid.shape)
            brute = float(grid[ia, ib])
            refined = _refine_distance(manifold, a, b, a.node_s[ia], b.node_s[ib])
            d = min(brute, refined)
            if d <= _CONTACT_FRACTION * max(a.length, b.length):
                raise IntersectionError(f"curves {i} and {j} intersect (distance {d:.3e})")
            dist[i, j] = dist[j, i] = d
            logger.debug(f"d[{i},{j}] = {d:.12g} (node minimum {brute:.12g})")
    return dist
