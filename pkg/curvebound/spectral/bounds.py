# spectral/bounds.py

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import exp1

from ..curves.system import CurveSystem
from ..errors import InvariantViolationError, SchemeError
from ..operator.principal import PrincipalMatrix
from ..types.common import ManifoldKind
from ..types.schemes import BoundState3D
from ..types.spectral import GershgorinBound, GershgorinRow, SpectralSolution

logger = logging.getLogger(__name__)

CERTIFICATE_FACTORS = (1.0, 1.05, 1.25, 1.5, 2.0, 4.0)

# E_star and E_gr both meet the threshold to this relative precision once the curves decouple
ORDERING_RTOL = 1e-9


def bound_holds(e_star: float, energy: float) -> bool:
    """E_star <= E_gr up to ORDERING_RTOL"""
    return energy >= e_star - ORDERING_RTOL * abs(e_star)


def gershgorin_disks(phi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Centres Phi_ii and radii sum_{j != i} |Phi_ij| of the Gershgorin disks"""
    phi = np.asarray(phi, dtype=float)
    centers = np.diag(phi).copy()
    radii = np.abs(phi).sum(axis=1) - np.abs(centers)
    return centers, radii


def gershgorin_margin(phi: np.ndarray) -> float:
    """min_i [Phi_ii - sum_{j != i} |Phi_ij|]; positive means every disk excludes 0 on the right"""
    centers, radii = gershgorin_disks(phi)
    return float(np.min(centers - radii))


def _certificate_row(matrix: PrincipalMatrix, E: float) -> GershgorinRow:
    phi = matrix.evaluate(E)
    centers, radii = gershgorin_disks(phi)
    return GershgorinRow(
        energy=E,
        margin=float(np.min(centers - radii)),
        min_diagonal=float(centers.min()),
        max_row_sum=float(radii.max()),
    )


def _require_boundstate(matrix: PrincipalMatrix) -> BoundState3D:
    scheme = matrix.scheme
    if not isinstance(scheme, BoundState3D):
        raise SchemeError(f"the Gershgorin bound needs the BoundState3D scheme, got {scheme.kind.value}")
    if matrix.size < 2:
        raise SchemeError("the Gershgorin bound needs at least two curves")
    return scheme


def gershgorin_lower_bound(matrix: PrincipalMatrix, solution: Optional[SpectralSolution] = None) -> GershgorinBound:
    """Largest E_star with every Gershgorin disk of Phi(E) excluding zero for E <= E_star"""
    scheme = _require_boundstate(matrix)
    solver = matrix.system.config.solver

    def margin(E: float) -> float:
        return gershgorin_margin(matrix.evaluate(E))

    e_hi = scheme.threshold
    if margin(e_hi) >= 0:
        e_star = e_hi
    else:
        e_lo = (1.0 + solver.seed_offset) * e_hi
        for _ in range(solver.max_doublings):
            if e_lo < solver.e_min or margin(e_lo) > 0:
                break
            e_hi, e_lo = e_lo, 2.0 * e_lo
        if e_lo < solver.e_min or not margin(e_lo) > 0:
            raise InvariantViolationError(
                f"Gershgorin criterion never holds down to E_min = {solver.e_min:g}; quadrature failure"
            )
        e_star = brentq(margin, e_lo, e_hi, xtol=1e-300, rtol=solver.root_rel_tol, maxiter=500)

    warnings: List[str] = []
    certificate = [_certificate_row(matrix, e_star * f) for f in CERTIFICATE_FACTORS]
    for row in certificate[1:]:
        if not row.margin > 0:
            message = f"Gershgorin margin {row.margin:.3e} is not positive at E = {row.energy:.6g}"
            logger.warning(message)
            warnings.append(message)

    analytic = None
    if matrix.system.manifold.kind is ManifoldKind.EUCLIDEAN_SPACE3:
        analytic = analytic_lower_bound(matrix.system)
        if not bound_holds(analytic, e_star):
            message = f"analytic estimate {analytic:.8g} lies above E_star = {e_star:.8g}"
            logger.warning(message)
            warnings.append(message)

    if solution is not None and not bound_holds(e_star, solution.energy):
        raise InvariantViolationError(
            f"E_gr = {solution.energy:.12g} lies below the Gershgorin bound E_star = {e_star:.12g}"
        )

    logger.info(f"Gershgorin bound E_star = {e_star:.12g}")
    return GershgorinBound(e_star=float(e_star), certificate=certificate, analytic_estimate=analytic,
                           warnings=warnings)


def analytic_lower_bound(system: CurveSystem) -> float:
    """Flat-space estimate of E_star from the exponential-integral diagonal bound.

    Solves (1/2pi)[log(kappa/nu_max) - E1(nu_min L_min/2)]
        = (N - 1) L_max e^{-kappa d_min} / (4 pi d_min)
    for kappa and returns -kappa^2.
    """
    scheme = system.scheme
    if not isinstance(scheme, BoundState3D):
        raise SchemeError(f"the analytic bound needs the BoundState3D scheme, got {scheme.kind.value}")
    if system.manifold.kind is not ManifoldKind.EUCLIDEAN_SPACE3:
        raise SchemeError(f"the analytic bound is only available on EuclideanSpace3, not {system.manifold.kind.value}")
    if system.size < 2:
        raise SchemeError("the analytic bound needs at least two curves")

    nu_max, nu_min = max(scheme.nu), min(scheme.nu)
    lengths = system.lengths
    l_min, l_max = float(min(lengths)), float(max(lengths))
    d_min = float(np.nanmin(system.distances))
    shift = float(exp1(0.5 * nu_min * l_min))
    n = system.size

    # the left side vanishes exactly at k_iso, so criterion(k_iso) = -right(k_iso) <= 0
    k_iso = nu_max * math.exp(shift)

    def right(kappa: float) -> float:
        return (n - 1) * l_max * math.exp(-kappa * d_min) / (4.0 * math.pi * d_min)

    def criterion(kappa: float) -> float:
        return math.log(kappa / k_iso) / (2.0 * math.pi) - right(kappa)

    if not criterion(k_iso) < 0:
        logger.debug(f"off-diagonal bound underflows at kappa = {k_iso:.6g}; returning the isolated-curve limit")
        return -k_iso * k_iso
    k_lo, k_hi = k_iso, 2.0 * k_iso
    while criterion(k_hi) <= 0:
        k_lo, k_hi = k_hi, 2.0 * k_hi
    kappa = brentq(criterion, k_lo, k_hi, xtol=1e-300, rtol=1e-14)
    return -kappa * kappa
