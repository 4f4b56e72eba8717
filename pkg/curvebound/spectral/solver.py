# spectral/solver.py

import logging
import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import brentq

from ..errors import InvariantViolationError, NoBoundStateError, SchemeError
from ..operator.principal import PrincipalMatrix
from ..types.schemes import BoundState3D
from ..types.spectral import PositivityReport, SpectralSolution
from .flow import fix_signs

logger = logging.getLogger(__name__)

# Tolerance on negative components of the positive ground-state vector
POSITIVITY_TOL = 1e-12
# Eigenvalues of Phi within this multiple of |Phi|_max are indistinguishable from zero
_ROUNDOFF = 64.0 * np.finfo(float).eps


class _CountingOmega:
    """omega_0(E) with an evaluation counter"""

    def __init__(self, matrix: PrincipalMatrix):
        self.matrix = matrix
        self.calls = 0

    def __call__(self, E: float) -> float:
        self.calls += 1
        value = self.matrix.lowest_eigenvalue(E)
        logger.debug(f"omega_0({E:.15g}) = {value:.15g}")
        return value


def _search_down(omega: Callable[[float], float], e_hi: float, e_lo: float, e_min: float,
                 max_steps: int) -> Tuple[float, float]:
    """Double e_lo until omega(e_lo) > 0; omega(e_hi) < 0 on entry"""
    for _ in range(max_steps):
        if e_lo < e_min:
            break
        if omega(e_lo) > 0:
            return e_lo, e_hi
        e_hi, e_lo = e_lo, 2.0 * e_lo
    raise NoBoundStateError(f"omega_0 stays non-positive down to E_min = {e_min:g}")


def _search_up(omega: Callable[[float], float], e_lo: float, e_max: float,
               max_steps: int) -> Tuple[float, float]:
    """Halve e_hi until omega(e_hi) < 0; omega(e_lo) > 0 on entry"""
    e_hi = 0.5 * e_lo
    for _ in range(max_steps):
        if e_hi > e_max:
            break
        if omega(e_hi) < 0:
            return e_lo, e_hi
        e_lo, e_hi = e_hi, 0.5 * e_hi
    raise NoBoundStateError(f"omega_0 stays positive up to E = {e_max:g}; no bound state below threshold")


def bracket_ground_state(matrix: PrincipalMatrix, omega: Optional[Callable[[float], float]] = None) -> Tuple[float, float]:
    """Energies (E_lo, E_hi) with omega_0(E_lo) >= 0 >= omega_0(E_hi)"""
    omega = omega or matrix.lowest_eigenvalue
    solver = matrix.system.config.solver
    scheme = matrix.scheme

    if isinstance(scheme, BoundState3D):
        e_up = scheme.threshold
        w_up = omega(e_up)
        if w_up > 0 and w_up <= _ROUNDOFF * float(np.max(np.abs(matrix.evaluate(e_up)))):
            logger.debug(f"omega_0 = {w_up:.3e} at the threshold is round-off; treating it as zero")
            w_up = 0.0
        if w_up == 0.0:
            return e_up, e_up
        if w_up > 0:
            raise InvariantViolationError(
                f"omega_0 is positive at the threshold E = {e_up:g}; on-shell diagonals should vanish there"
            )
        start = (1.0 + solver.seed_offset) * e_up
        return _search_down(omega, e_up, start, solver.e_min, solver.max_doublings)

    seed = scheme.seed_energy()
    w_seed = omega(seed)
    if w_seed == 0.0:
        return seed, seed
    if w_seed < 0:
        return _search_down(omega, seed, 2.0 * seed, solver.e_min, solver.max_doublings)
    return _search_up(omega, seed, solver.e_max_2d, solver.max_doublings)


def solve_ground_state(matrix: PrincipalMatrix) -> SpectralSolution:
    """Ground-state energy: the unique zero of the lowest eigenvalue of Phi(E)"""
    omega = _CountingOmega(matrix)
    solver = matrix.system.config.solver
    e_lo, e_hi = bracket_ground_state(matrix, omega)
    logger.info(f"ground state bracketed in [{e_lo:.12g}, {e_hi:.12g}]")

    if e_lo == e_hi:
        energy = e_lo
    else:
        energy = brentq(omega, e_lo, e_hi, xtol=1e-300, rtol=solver.root_rel_tol, maxiter=500)

    phi = matrix.evaluate(energy)
    values, vectors = eigh(phi)
    vector = fix_signs(vectors[:, :1])[:, 0]
    warnings: List[str] = list(matrix.report.warnings)
    unresolved = np.abs(vector) <= POSITIVITY_TOL
    offdiag = phi[~np.eye(phi.shape[0], dtype=bool)]
    if np.any(unresolved) and vector.size > 1 and np.all(offdiag <= 0):
        # below float resolution the sign of a Perron component is round-off
        vector = np.where(unresolved, np.abs(vector), vector)
        message = (f"{int(unresolved.sum())} ground-state component(s) are below {POSITIVITY_TOL:g} "
                   "and not resolved in floating point")
        logger.warning(message)
        warnings.append(message)
    dphi = matrix.derivative(energy)
    slope = float(vector @ dphi @ vector)
    if not slope < 0:
        message = f"omega_0'(E_gr) = {slope:.6g} is not negative"
        logger.warning(message)
        warnings.append(message)
    gap = float(values[1] - values[0]) if values.size > 1 else None
    if gap is not None and gap <= 1e-12 * max(1.0, abs(values[0])):
        message = f"lowest eigenvalue of Phi(E_gr) is degenerate (gap {gap:.3e})"
        logger.warning(message)
        warnings.append(message)

    solution = SpectralSolution(
        energy=float(energy),
        vector=vector,
        omega_slope=slope,
        normalization=abs(slope) ** -0.5 if slope != 0 else math.inf,
        bracket=(float(e_lo), float(e_hi)),
        residual=abs(float(values[0])),
        gap=gap,
        evaluations=omega.calls,
        warnings=warnings,
    )
    logger.info(f"E_gr = {solution.energy:.15g} after {omega.calls} evaluations")
    return solution


def positivity_check(solution: SpectralSolution, matrix: PrincipalMatrix) -> PositivityReport:
    """Check the Perron-Frobenius structure of Phi(E_gr).

    When every off-diagonal entry is strictly negative the lowest eigenvalue
    must be simple with a strictly positive eigenvector; a resolvable
    violation raises. Components within POSITIVITY_TOL of zero count as
    non-negative, with a warning. Decoupled systems (some entry underflows
    to zero) only get a report.
    """
    phi = matrix.evaluate(solution.energy)
    n = phi.shape[0]
    offdiag = phi[~np.eye(n, dtype=bool)]
    max_offdiag = float(offdiag.max()) if offdiag.size else None
    offdiag_negative = bool(offdiag.size == 0 or np.all(offdiag < 0))
    min_component = float(solution.vector.min())
    vector_positive = min_component > 0
    unresolved = int(np.sum(np.abs(solution.vector) <= POSITIVITY_TOL))
    coupling_resolved = offdiag.size == 0 or float(np.max(np.abs(offdiag))) > _ROUNDOFF * float(np.max(np.abs(phi)))
    warnings: List[str] = []

    if offdiag_negative and n > 1:
        if min_component < -POSITIVITY_TOL:
            raise InvariantViolationError(
                f"ground-state vector has a negative component {min_component:.3e} "
                "although Phi(E_gr) has negative off-diagonal entries"
            )
        if solution.gap is not None and solution.gap <= 0:
            if coupling_resolved:
                raise InvariantViolationError("lowest eigenvalue of an irreducible Phi(E_gr) is not simple")
            warnings.append("off-diagonal entries are below round-off; simplicity of omega_0 is not resolved")
        if unresolved:
            warnings.append(f"{unresolved} component(s) of A0 lie within {POSITIVITY_TOL:g} of zero")
    elif not offdiag_negative:
        logger.info("off-diagonal entries of Phi(E_gr) are not all negative; positivity is not enforced")
    for message in warnings:
        logger.warning(message)

    return PositivityReport(
        offdiag_negative=offdiag_negative,
        vector_positive=vector_positive,
        max_offdiag=max_offdiag,
        min_component=min_component,
        gap=solution.gap,
        passed=offdiag_negative and min_component >= -POSITIVITY_TOL,
        unresolved_components=unresolved,
        warnings=warnings,
    )


def predicted_binding_shift(matrix: PrincipalMatrix) -> float:
    """Newton estimate of threshold - E_gr from omega_0 and its slope at the threshold.

    Zero when the coupling leaves omega_0(threshold) at zero in floating point.
    """
    scheme = matrix.scheme
    if not isinstance(scheme, BoundState3D):
        raise SchemeError(f"the binding shift is defined for BoundState3D, got {scheme.kind.value}")
    threshold = scheme.threshold
    values, vectors = eigh(matrix.evaluate(threshold))
    if not values[0] < 0:
        return 0.0
    vector = vectors[:, 0]
    slope = float(vector @ matrix.derivative(threshold) @ vector)
    return float(values[0] / slope) if slope < 0 else math.inf
