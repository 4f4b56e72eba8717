# operator/principal.py

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import exp1

from ..curves.curve import Curve
from ..curves.system import CurveSystem
from ..errors import DomainError, SchemeError
from ..types.common import ManifoldKind, QuadratureReport, SchemeKind
from ..types.schemes import BoundState3D, Finite2D, Regularized, RGSubtracted, Scheme
from .quadrature import diagonal_average, graded_rule, pair_average

logger = logging.getLogger(__name__)

FOUR_PI = 4.0 * math.pi
EULER_GAMMA = float(np.euler_gamma)
# Separation below which the RG integrand is taken as constant
_RG_INNERMOST_FLOOR = 1e-7
# Image terms of the circle counterterm are dropped once e^{-mu n L} < e^{-40}
_IMAGE_DECAY = 40.0
_IMAGE_BLOCK = 1024
_CACHE_LIMIT = 512

Entry = Tuple[float, float]


def _kappa(E: float) -> float:
    if not E < 0:
        raise DomainError(
            f"energy must be negative, got {E}; positive energies need the analytically continued form"
        )
    return math.sqrt(-E)


def _require_flat3(manifold_kind: ManifoldKind, what: str) -> None:
    if manifold_kind is not ManifoldKind.EUCLIDEAN_SPACE3:
        raise SchemeError(f"{what} is only available on EuclideanSpace3, not {manifold_kind.value}")


def _offdiag(system: CurveSystem, i: int, j: int, kernel: Callable) -> Entry:
    a, b = system.curves[i], system.curves[j]
    mean, err = pair_average(a, b, kernel)
    scale = math.sqrt(a.length * b.length)
    return -scale * mean, scale * err


# Off-diagonal entries


def phi_offdiag(system: CurveSystem, i: int, j: int, E: float) -> float:
    """-(L_i L_j)^{-1/2} int int G_kappa(gamma_i(s), gamma_j(s')) ds ds'"""
    if i == j:
        raise DomainError("phi_offdiag needs two distinct curves")
    kappa = _kappa(E)
    m = system.manifold
    return _offdiag(system, i, j, lambda x, y: m.resolvent_kernel(kappa, x, y))[0]


def offdiag_envelope(system: CurveSystem, i: int, j: int, E: float) -> float:
    """sqrt(L_i L_j) e^{-kappa d_ij} / (4 pi d_ij), an upper bound on |Phi_ij(E)| in flat space"""
    _require_flat3(system.manifold.kind, "the off-diagonal envelope")
    kappa = _kappa(E)
    d = system.distances[i, j]
    return math.sqrt(system.curves[i].length * system.curves[j].length) * math.exp(-kappa * d) / (FOUR_PI * d)


# Diagonal entries


def phi_diag_renormalized(curve: Curve, inverse_lambda_R: float, mu: float, E: float) -> float:
    """1/lambda_R + (1/L) int int [G_mu - G_kappa] ds ds'"""
    kappa = _kappa(E)
    if not mu > 0:
        raise SchemeError(f"renormalization scale must be positive, got {mu}")
    m = curve.manifold
    value, _ = diagonal_average(curve, lambda x, y: m.resolvent_difference(mu, kappa, x, y))
    return inverse_lambda_R + value


def phi_diag_boundstate(system: CurveSystem, i: int, E: float) -> float:
    """On-shell diagonal: (1/L_i) int int [G_nu_i - G_kappa] ds ds', zero at E = -nu_i^2"""
    scheme = system.scheme
    if not isinstance(scheme, BoundState3D):
        raise SchemeError(f"phi_diag_boundstate needs the BoundState3D scheme, got {scheme.kind.value}")
    return _boundstate_diagonal(system, i, E)[0]


def _boundstate_diagonal(system: CurveSystem, i: int, E: float) -> Entry:
    kappa = _kappa(E)
    nu = system.scheme.nu[i]
    if not nu > 0:
        raise SchemeError(f"binding wavenumber must be positive, got {nu}")
    m = system.manifold
    return diagonal_average(system.curves[i], lambda x, y: m.resolvent_difference(nu, kappa, x, y))


def diagonal_lower_bound(curve: Curve, nu: float, E: float) -> float:
    """Flat-space lower bound (1/2pi)[log(kappa/nu) - E1(nu L/2) + E1(kappa L/2)] on the on-shell diagonal"""
    _require_flat3(curve.manifold.kind, "the analytic diagonal bound")
    kappa = _kappa(E)
    if kappa < nu:
        raise DomainError(f"the bound holds for E <= -nu^2 = {-nu * nu}, got E = {E}")
    half = 0.5 * curve.length
    return (math.log(kappa / nu) - exp1(nu * half) + exp1(kappa * half)) / (2.0 * math.pi)


# Regularized scheme


def bare_inverse_coupling(curve: Curve, eps: float, inverse_lambda_R: float, mu: float) -> float:
    """1/lambda(eps) = 1/lambda_R + (1/L) int int int_eps^inf e^{-(mu^2 + eps) t} K_t"""
    if not eps > 0:
        raise SchemeError(f"cutoff eps must be positive, got {eps}")
    m = curve.manifold
    a = mu * mu + eps
    value, _ = diagonal_average(curve, lambda x, y: m.cutoff_resolvent(eps, a, x, y))
    return inverse_lambda_R + value


def _regularized_diagonal(system: CurveSystem, i: int, E: float) -> Entry:
    _kappa(E)
    scheme: Regularized = system.scheme
    m = system.manifold
    a = scheme.eps - E
    value, err = diagonal_average(system.curves[i], lambda x, y: m.cutoff_resolvent(scheme.eps, a, x, y))
    return scheme.inverse_couplings[i] - value, err


def _regularized_offdiag(system: CurveSystem, i: int, j: int, E: float) -> Entry:
    _kappa(E)
    scheme: Regularized = system.scheme
    m = system.manifold
    a = scheme.eps - E
    return _offdiag(system, i, j, lambda x, y: m.cutoff_resolvent(scheme.eps, a, x, y))


def regularization_warnings(system: CurveSystem) -> List[str]:
    scheme = system.scheme
    messages = []
    if isinstance(scheme, Regularized):
        for idx, curve in enumerate(system.curves):
            if scheme.eps > 0.1 * curve.length ** 2:
                messages.append(
                    f"cutoff eps={scheme.eps:g} exceeds 0.1 L^2 = {0.1 * curve.length ** 2:.4g} for curve {idx}; "
                    "regularization regime is not asymptotic"
                )
    return messages


def phi_regularized(system: CurveSystem, E: float) -> np.ndarray:
    """Phi_eps(E) with the system's bare couplings 1/lambda_i(eps)"""
    if not isinstance(system.scheme, Regularized):
        raise SchemeError(f"phi_regularized needs the Regularized scheme, got {system.scheme.kind.value}")
    for message in regularization_warnings(system):
        logger.warning(message)
    return PrincipalMatrix(system).evaluate(E)


# RG-subtracted scheme


def _counterterm_images(xi: np.ndarray, mu: float, length: float) -> np.ndarray:
    """sum_{n >= 1} [f(nL + xi) + f(nL - xi)] with f(x) = e^{-mu x} / (4 pi x)"""
    xi = np.asarray(xi, dtype=float)
    n_max = int(math.ceil(_IMAGE_DECAY / (mu * length))) + 2
    total = np.zeros_like(xi)
    for start in range(1, n_max + 1, _IMAGE_BLOCK):
        n = np.arange(start, min(start + _IMAGE_BLOCK, n_max + 1), dtype=float)[:, None] * length
        plus = n + xi
        minus = n - xi
        total += np.sum(np.exp(-mu * plus) / plus + np.exp(-mu * minus) / minus, axis=0)
    return total / FOUR_PI


def phi_rg_subtracted(curve: Curve, inverse_lambda_R: float, mu: float, E: float) -> float:
    """1/lambda_R + (1/L) int ds int dxi [sum_n e^{-mu|xi + nL|}/(4 pi |xi + nL|) - G_kappa]"""
    return _rg_diagonal(curve, inverse_lambda_R, mu, E)[0]


def _rg_diagonal(curve: Curve, inverse_lambda_R: float, mu: float, E: float) -> Entry:
    _require_flat3(curve.manifold.kind, "the RG-subtracted scheme")
    kappa = _kappa(E)
    if not mu > 0:
        raise SchemeError(f"renormalization scale must be positive, got {mu}")
    length = curve.length
    config = curve.config
    if config.innermost_fraction < _RG_INNERMOST_FLOOR:
        config = replace(config, innermost_fraction=_RG_INNERMOST_FLOOR)
    rule = graded_rule(length, config)
    images = _counterterm_images(rule.nodes, mu, length)[None, :]

    def kernel(xi: np.ndarray, r: np.ndarray) -> np.ndarray:
        damp = np.exp(-mu * xi)
        direct = damp * (r - xi) / (xi * r) - damp * np.expm1(mu * xi - kappa * r) / r
        return direct / FOUR_PI + images

    coincidence = (kappa - mu) / FOUR_PI + float(_counterterm_images(np.zeros(1), mu, length)[0])
    value, err = diagonal_average(
        curve,
        kernel=None,
        innermost=lambda a0: a0 * coincidence,
        config=config,
        separation_kernel=kernel,
    )
    return inverse_lambda_R + value, err


# Finite 2D scheme


def _log_innermost(kappa: float) -> Callable[[float], float]:
    """int_0^a0 K0(kappa xi) / (2 pi) d xi from the small-argument form of K0"""
    def integral(a0: float) -> float:
        return -(a0 * math.log(kappa * a0 / 2.0) - a0 + EULER_GAMMA * a0) / (2.0 * math.pi)
    return integral


def _plain_diagonal_2d(curve: Curve, kappa: float) -> Entry:
    m = curve.manifold
    return diagonal_average(curve, lambda x, y: m.resolvent_kernel(kappa, x, y), innermost=_log_innermost(kappa))


def _finite2d_diagonal(system: CurveSystem, i: int, E: float) -> Entry:
    kappa = _kappa(E)
    value, err = _plain_diagonal_2d(system.curves[i], kappa)
    return 1.0 / system.scheme.couplings[i] - value, err


def phi_finite2d(system: CurveSystem, E: float) -> np.ndarray:
    """Phi(E) of the planar theory: 1/lambda_i - (1/L_i) int int K0(kappa r)/(2 pi) on the diagonal"""
    if not isinstance(system.scheme, Finite2D):
        raise SchemeError(f"phi_finite2d needs the Finite2D scheme, got {system.scheme.kind.value}")
    return PrincipalMatrix(system).evaluate(E)


def coupling_for_binding(curve: Curve, nu: float) -> float:
    """Planar coupling lambda for which an isolated curve binds at E = -nu^2"""
    if curve.manifold.kind is not ManifoldKind.EUCLIDEAN_PLANE:
        raise SchemeError(f"coupling_for_binding is defined on EuclideanPlane, not {curve.manifold.kind.value}")
    if not nu > 0:
        raise SchemeError(f"binding wavenumber must be positive, got {nu}")
    value, _ = _plain_diagonal_2d(curve, nu)
    if not value > 0:
        raise DomainError(f"binding wavenumber {nu} is too large for a positive coupling on this curve")
    return 1.0 / value


# Energy derivative


def _derivative_diagonal(system: CurveSystem, i: int, E: float) -> Entry:
    m = system.manifold
    curve = system.curves[i]
    if isinstance(system.scheme, Regularized):
        _kappa(E)
        eps = system.scheme.eps
        value, err = diagonal_average(curve, lambda x, y: m.cutoff_derivative(eps, eps - E, x, y))
    else:
        kappa = _kappa(E)
        value, err = diagonal_average(curve, lambda x, y: m.resolvent_derivative(kappa, x, y))
    return -value, err


def _derivative_offdiag(system: CurveSystem, i: int, j: int, E: float) -> Entry:
    m = system.manifold
    if isinstance(system.scheme, Regularized):
        _kappa(E)
        eps = system.scheme.eps
        return _offdiag(system, i, j, lambda x, y: m.cutoff_derivative(eps, eps - E, x, y))
    kappa = _kappa(E)
    return _offdiag(system, i, j, lambda x, y: m.resolvent_derivative(kappa, x, y))


def phi_derivative(system: CurveSystem, E: float, scheme: Optional[Scheme] = None) -> np.ndarray:
    """dPhi/dE = -(L_i L_j)^{-1/2} int int int t e^{E t} K_t; every entry negative"""
    if scheme is not None and scheme is not system.scheme:
        system = system.with_scheme(scheme)
    return PrincipalMatrix(system).derivative(E)


# Assembly


def _diagonal_entry(system: CurveSystem, i: int, E: float) -> Entry:
    kind = system.scheme.kind
    if kind is SchemeKind.BOUND_STATE_3D:
        return _boundstate_diagonal(system, i, E)
    if kind is SchemeKind.FINITE_2D:
        return _finite2d_diagonal(system, i, E)
    if kind is SchemeKind.RG_SUBTRACTED:
        scheme: RGSubtracted = system.scheme
        return _rg_diagonal(system.curves[i], scheme.inverse_coupling, scheme.mu, E)
    return _regularized_diagonal(system, i, E)


def _offdiag_entry(system: CurveSystem, i: int, j: int, E: float) -> Entry:
    if system.scheme.kind is SchemeKind.REGULARIZED:
        return _regularized_offdiag(system, i, j, E)
    kappa = _kappa(E)
    m = system.manifold
    return _offdiag(system, i, j, lambda x, y: m.resolvent_kernel(kappa, x, y))


class PrincipalMatrix:
    """Phi(E) and dPhi/dE of a curve system under its scheme.

    Entries are assembled independently (optionally on a thread pool) and
    cached per energy; returned matrices are fresh copies.
    """

    def __init__(self, system: CurveSystem, threads: Optional[int] = None):
        self.system = system
        self.threads = threads or system.config.solver.threads
        self._cache: Dict[Tuple[str, float], np.ndarray] = {}
        self._lock = threading.Lock()
        curve = system.curves[0]
        rule = graded_rule(curve.length, curve.config)
        self.report = QuadratureReport(
            nodes=[c.nodes for c in system.curves],
            panel_order=curve.config.panel_order,
            panels=rule.panels,
            innermost_panel=rule.innermost,
            warnings=list(system.warnings) + regularization_warnings(system),
        )
        for message in self.report.warnings:
            logger.debug(message)

    @property
    def scheme(self) -> Scheme:
        return self.system.scheme

    @property
    def size(self) -> int:
        return self.system.size

    @property
    def energy_ceiling(self) -> float:
        """Phi(E) is defined for E below this value"""
        return 0.0

    def _assemble(self, E: float, diagonal: Callable, offdiag: Callable) -> np.ndarray:
        n = self.size
        jobs = [(i, j) for i in range(n) for j in range(i, n)]

        def run(job):
            i, j = job
            return diagonal(self.system, i, E) if i == j else offdiag(self.system, i, j, E)

        if self.threads > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                results = list(pool.map(run, jobs))
        else:
            results = [run(job) for job in jobs]

        matrix = np.empty((n, n))
        worst = 0.0
        for (i, j), (value, err) in zip(jobs, results):
            matrix[i, j] = matrix[j, i] = value
            worst = max(worst, err)
            if i != j:
                self.report.offdiag_error[f"{i},{j}"] = err
        self.report.estimated_error = max(self.report.estimated_error, worst)
        return matrix

    def _cached(self, tag: str, E: float, build: Callable[[], np.ndarray]) -> np.ndarray:
        key = (tag, float(E))
        with self._lock:
            hit = self._cache.get(key)
        if hit is None:
            hit = build()
            with self._lock:
                if len(self._cache) >= _CACHE_LIMIT:
                    self._cache.clear()
                self._cache[key] = hit
        return hit.copy()

    def evaluate(self, E: float) -> np.ndarray:
        _kappa(E)
        return self._cached("phi", E, lambda: self._assemble(E, _diagonal_entry, _offdiag_entry))

    __call__ = evaluate

    def derivative(self, E: float) -> np.ndarray:
        _kappa(E)
        return self._cached("dphi", E, lambda: self._assemble(E, _derivative_diagonal, _derivative_offdiag))

    def lowest_eigenvalue(self, E: float) -> float:
        return float(np.linalg.eigvalsh(self.evaluate(E))[0])

    def entry_diagnostics(self, E: float) -> List[Dict[str, Any]]:
        """Per-entry values and quadrature error estimates at one energy"""
        rows = []
        for i in range(self.size):
            for j in range(i, self.size):
                if i == j:
                    value, err = _diagonal_entry(self.system, i, E)
                else:
                    value, err = _offdiag_entry(self.system, i, j, E)
                rows.append({"i": i, "j": j, "E": E, "value": value, "error_estimate": err,
                             "nodes": [self.system.curves[i].nodes, self.system.curves[j].nodes]})
        return rows
