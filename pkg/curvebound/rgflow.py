# rgflow.py

import logging
import math
from typing import Any, Dict, List, Sequence, Union

import numpy as np
from scipy.integrate import quad, solve_ivp

from .curves.curve import Curve
from .errors import DomainError, FlowSingularityError, SchemeError
from .operator.principal import phi_rg_subtracted
from .types.common import ManifoldKind
from .types.spectral import FlowConstant, RGState, ScalingReport

logger = logging.getLogger(__name__)

ODE_RTOL = 1e-12
# The ODE variant stops once |lambda| grows by this factor
_BLOWUP = 1e12


def flow_constant(length: float, mu: float) -> FlowConstant:
    """C = (L / mu) int e^{-t} K_t^{S^1} contracted over the circle of circumference mu L.

    The circle kernel integrates in t to the image sum
    sum_n e^{-|y + n l|} / 2 = cosh(l/2 - |y|) / (2 sinh(l/2)) on |y| <= l/2, l = mu L.
    """
    if not length > 0:
        raise DomainError(f"curve length must be positive, got {length}")
    if not mu > 0:
        raise DomainError(f"renormalization scale must be positive, got {mu}")
    ell = mu * length

    def image_sum(y: float) -> float:
        # cosh(a)/sinh(b) written with decaying exponentials
        a = 0.5 * ell - abs(y)
        return 0.5 * (math.exp(a - 0.5 * ell) + math.exp(-a - 0.5 * ell)) / -math.expm1(-ell)

    half = 0.5 * ell
    value, error = quad(image_sum, -half, half, points=[0.0], epsabs=1e-15, epsrel=1e-13, limit=200)
    return FlowConstant(value=length * value, error=length * error)


def _length(curve: Union[Curve, float]) -> float:
    return curve.length if isinstance(curve, Curve) else float(curve)


def rg_state(curve: Union[Curve, float], lambda_R: float, mu: float) -> RGState:
    length = _length(curve)
    constant = flow_constant(length, mu)
    return RGState(lambda_R=float(lambda_R), mu=float(mu), length=length, constant=constant.value)


def beta_function(curve: Union[Curve, float], lambda_R: float, mu: float) -> float:
    """beta = mu d lambda_R / d mu = -lambda_R^2 C / (2 pi L)"""
    if not math.isfinite(lambda_R):
        raise DomainError(f"lambda_R must be finite, got {lambda_R}")
    state = rg_state(curve, lambda_R, mu)
    return _beta(state, lambda_R)


def _beta(state: RGState, lam: float) -> float:
    return -lam * lam * state.constant / (2.0 * math.pi * state.length)


def tau_pole(state: RGState) -> float:
    """Scale ratio at which the closed-form flow diverges; inf for lambda_R = 0"""
    if state.lambda_R == 0:
        return math.inf
    return math.exp(-2.0 * math.pi * state.length / (state.lambda_R * state.constant))


def flow_inverse_coupling(state: RGState, inverse_lambda_R: float, tau: float) -> float:
    """1/lambda_R(tau mu) = 1/lambda_R(mu) + C log(tau) / (2 pi L)"""
    if not tau > 0:
        raise DomainError(f"scale ratio tau must be positive, got {tau}")
    return inverse_lambda_R + state.constant * math.log(tau) / (2.0 * math.pi * state.length)


def flow_coupling(state: RGState, tau: float) -> float:
    """lambda_R(tau mu) = lambda_R(mu) / (1 + lambda_R(mu) C log(tau) / (2 pi L))"""
    if not tau > 0:
        raise DomainError(f"scale ratio tau must be positive, got {tau}")
    lam = state.lambda_R
    if lam == 0:
        return 0.0
    denominator = 1.0 + lam * state.constant * math.log(tau) / (2.0 * math.pi * state.length)
    if not denominator > 0:
        raise FlowSingularityError(f"coupling flow from lambda_R={lam:g} crosses its pole", tau_pole(state))
    return lam / denominator


def flow_coupling_ode(state: RGState, tau: float) -> float:
    """lambda_R(tau mu) by integrating d lambda / d log(mu) = beta(lambda) with DOP853"""
    if not tau > 0:
        raise DomainError(f"scale ratio tau must be positive, got {tau}")
    lam0 = state.lambda_R
    if lam0 == 0 or tau == 1.0:
        return lam0
    limit = _BLOWUP * abs(lam0)

    def blowup(_, y):
        return limit - abs(y[0])

    blowup.terminal = True
    solution = solve_ivp(
        lambda _, y: [_beta(state, y[0])],
        (0.0, math.log(tau)),
        [lam0],
        method="DOP853",
        rtol=ODE_RTOL,
        atol=1e-300,
        events=blowup,
    )
    if solution.status == 1:
        raise FlowSingularityError(f"integrated flow from lambda_R={lam0:g} blows up", tau_pole(state))
    if not solution.success:
        raise FlowSingularityError(f"flow integration failed: {solution.message}", tau_pole(state))
    return float(solution.y[0, -1])


def flow_table(state: RGState, taus: Sequence[float]) -> List[Dict[str, Any]]:
    """Rows (tau, closed-form and integrated lambda_R(tau mu)); pole crossings are reported per row"""
    rows = []
    for tau in taus:
        row: Dict[str, Any] = {"tau": float(tau), "mu": state.mu * tau}
        try:
            row["lambda_R"] = flow_coupling(state, tau)
            row["lambda_R_ode"] = flow_coupling_ode(state, tau)
            row["beta"] = _beta(state, row["lambda_R"])
        except FlowSingularityError as e:
            logger.warning(str(e))
            row.update(lambda_R=math.nan, lambda_R_ode=math.nan, beta=math.nan)
        rows.append(row)
    return rows


def flow_ode_residual(state: RGState, taus: Sequence[float], rel_step: float = 1e-4) -> float:
    """max |tau d lambda/d tau - beta(lambda)| / |beta| of the closed form over a tau grid"""
    worst = 0.0
    for tau in taus:
        hi = flow_coupling(state, tau * math.exp(rel_step))
        lo = flow_coupling(state, tau * math.exp(-rel_step))
        lam = flow_coupling(state, tau)
        beta = _beta(state, lam)
        if beta == 0:
            continue
        worst = max(worst, abs((hi - lo) / (2.0 * rel_step) - beta) / abs(beta))
    return worst


def _require_flat(curve: Curve) -> None:
    if curve.manifold.kind is not ManifoldKind.EUCLIDEAN_SPACE3:
        raise SchemeError(f"scaling checks need EuclideanSpace3, not {curve.manifold.kind.value}")


def _inverse(lambda_R: float) -> float:
    return 0.0 if math.isinf(lambda_R) else 1.0 / lambda_R


def scaling_law_check(curve: Curve, lambda_R: float, mu: float, E: float, tau: float) -> ScalingReport:
    """Compare Phi_R(mu, lambda_R(mu), tau^2 E, tau^-2 g) with Phi_R(mu, lambda_R(tau mu), E, g).

    The metric scaling g -> tau^-2 g is realized as the coordinate scaling
    x -> x / tau of the curve.
    """
    _require_flat(curve)
    if not tau > 0:
        raise DomainError(f"scale ratio tau must be positive, got {tau}")
    inverse = _inverse(lambda_R)
    state = RGState(lambda_R=lambda_R if math.isfinite(lambda_R) else 0.0, mu=mu, length=curve.length,
                    constant=flow_constant(curve.length, mu).value)
    flowed_inverse = flow_inverse_coupling(state, inverse, tau)

    lhs = phi_rg_subtracted(curve.scaled(1.0 / tau), inverse, mu, tau * tau * E)
    rhs = phi_rg_subtracted(curve, flowed_inverse, mu, E)
    report = ScalingReport(
        tau=float(tau),
        energy=float(E),
        lhs=lhs,
        rhs=rhs,
        discrepancy=abs(lhs - rhs),
        flowed_coupling=math.inf if flowed_inverse == 0 else 1.0 / flowed_inverse,
    )
    logger.debug(f"scaling law tau={tau:g} E={E:g}: |lhs - rhs| = {report.discrepancy:.3e}")
    return report


def mu_invariance(curve: Curve, lambda_R: float, mu: float, E: float, factor: float = 1.01) -> float:
    """Finite-difference d Phi_R / d mu along the coupling flow; vanishes for a consistent scheme"""
    _require_flat(curve)
    if not factor > 0 or factor == 1.0:
        raise DomainError(f"mu factor must be positive and different from 1, got {factor}")
    inverse = _inverse(lambda_R)
    state = RGState(lambda_R=lambda_R if math.isfinite(lambda_R) else 0.0, mu=mu, length=curve.length,
                    constant=flow_constant(curve.length, mu).value)
    base = phi_rg_subtracted(curve, inverse, mu, E)
    moved = phi_rg_subtracted(curve, flow_inverse_coupling(state, inverse, factor), factor * mu, E)
    return (moved - base) / (mu * (factor - 1.0))


def scaling_grid(curve: Curve, lambda_R: float, mu: float, taus: Sequence[float],
                 energies: Sequence[float]) -> List[ScalingReport]:
    return [scaling_law_check(curve, lambda_R, mu, E, tau) for tau in taus for E in energies]


def max_discrepancy(reports: Sequence[ScalingReport]) -> float:
    return float(np.max([r.discrepancy for r in reports])) if reports else 0.0
