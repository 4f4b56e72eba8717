# spectral/wavefunction.py

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import minimize_scalar

from ..curves.curve import Curve
from ..curves.system import CurveSystem
from ..errors import DomainError
from ..geometry.base import Manifold
from ..types.spectral import SpectralSolution, Wavefunction

logger = logging.getLogger(__name__)

NEAR_SUPPORT_FRACTION = 1e-6


def _distance_to_curve(manifold: Manifold, curve: Curve, point: np.ndarray, s0: float) -> float:
    h = curve.node_spacing
    result = minimize_scalar(
        lambda s: float(manifold.geodesic_distance(point, curve.eval(s))),
        bounds=(s0 - h, s0 + h),
        method="bounded",
        options={"xatol": 1e-12 * curve.length},
    )
    return float(result.fun)


def _curve_term(manifold: Manifold, curve: Curve, kappa: float, points: np.ndarray,
                chunk: int) -> Tuple[np.ndarray, np.ndarray]:
    """L^{1/2} <G_kappa(x, gamma(s))>_s and the distance of x to the curve"""
    n = curve.nodes
    out = np.empty(points.shape[0])
    dist = np.empty(points.shape[0])
    rows = max(1, chunk // n)
    for start in range(0, points.shape[0], rows):
        block = points[start:start + rows]
        r = manifold.geodesic_distance(block[:, None, :], curve.points[None, :, :])
        nearest = np.argmin(r, axis=1)
        dmin = r[np.arange(block.shape[0]), nearest]
        for k in np.flatnonzero(dmin < curve.node_spacing):
            dmin[k] = min(dmin[k], _distance_to_curve(manifold, curve, block[k], curve.node_s[nearest[k]]))
        dist[start:start + rows] = dmin
        values = np.full(block.shape[0], math.inf)
        ok = np.all(r > 0, axis=1)
        if np.any(ok):
            g = manifold.resolvent_kernel(kappa, block[ok][:, None, :], curve.points[None, :, :])
            values[ok] = math.sqrt(curve.length) * g.mean(axis=1)
        out[start:start + rows] = values
    return out, dist


def ground_state_wavefunction(solution: SpectralSolution, system: CurveSystem, points: Any) -> Wavefunction:
    """psi(x) = N sum_i A_i L_i^{-1/2} int ds G_{E_gr}(x, gamma_i(s))"""
    manifold = system.manifold
    pts = manifold.reduce(manifold.validate_points(points))
    shape = pts.shape[:-1]
    pts = pts.reshape(-1, manifold.dimension)
    if not solution.energy < 0:
        raise DomainError(f"ground-state energy must be negative, got {solution.energy}")
    kappa = math.sqrt(-solution.energy)
    chunk = manifold.quadrature.chunk_size
    threads = system.config.solver.threads

    def term(i: int):
        return _curve_term(manifold, system.curves[i], kappa, pts, chunk)

    if threads > 1 and system.size > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            terms = list(pool.map(term, range(system.size)))
    else:
        terms = [term(i) for i in range(system.size)]

    values = np.zeros(pts.shape[0])
    near = np.zeros(pts.shape[0], dtype=bool)
    for amplitude, curve, (value, dist) in zip(solution.vector, system.curves, terms):
        values += amplitude * value
        near |= dist < NEAR_SUPPORT_FRACTION * curve.length
    values *= solution.normalization

    warnings: List[str] = []
    if np.any(near):
        message = (f"{int(near.sum())} evaluation point(s) lie within {NEAR_SUPPORT_FRACTION:g} L of a curve; "
                   "psi diverges on the support")
        logger.warning(message)
        warnings.append(message)
    finite = np.isfinite(values)
    if np.any(values[finite] <= 0):
        message = "non-positive wavefunction value off the support"
        logger.warning(message)
        warnings.append(message)

    return Wavefunction(
        points=pts.reshape(shape + (manifold.dimension,)),
        values=values.reshape(shape),
        near_support=near.reshape(shape),
        warnings=warnings,
    )


def grid_points(axes: Sequence[Sequence[float]]) -> np.ndarray:
    """Rectilinear grid with shape (n_1, ..., n_d, d) in 'ij' ordering"""
    mesh = np.meshgrid(*[np.asarray(a, dtype=float) for a in axes], indexing="ij")
    return np.stack(mesh, axis=-1)


def l2_normalization(values: np.ndarray, axes: Sequence[Sequence[float]],
                     manifold: Optional[Manifold] = None) -> float:
    """Factor c with int_box |c psi|^2 dvol = 1 on a rectilinear grid"""
    values = np.asarray(values, dtype=float)
    axes = [np.asarray(a, dtype=float) for a in axes]
    if values.shape != tuple(a.size for a in axes):
        raise DomainError(f"grid values of shape {values.shape} do not match the axes")
    if not np.all(np.isfinite(values)):
        raise DomainError("L2 normalization needs finite values; the grid touches a curve")
    density = values * values
    if manifold is not None:
        density = density * manifold.conformal_factor(grid_points(axes)) ** manifold.dimension
    integral = density
    for axis in reversed(axes):
        integral = trapezoid(integral, axis, axis=-1)
    if not integral > 0:
        raise DomainError("wavefunction has zero norm on the grid")
    return float(integral) ** -0.5
