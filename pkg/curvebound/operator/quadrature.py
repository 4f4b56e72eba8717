# operator/quadrature.py

import threading
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from ..config.settings import QuadratureConfig
from ..curves.curve import Curve

Kernel = Callable[[np.ndarray, np.ndarray], np.ndarray]

_stencil_lock = threading.Lock()


@dataclass(frozen=True)
class GradedRule:
    """Gauss-Legendre panels on (a0, L/2], geometrically graded towards xi = 0"""
    nodes: np.ndarray
    weights: np.ndarray
    innermost: float
    panels: int


def graded_rule(length: float, config: QuadratureConfig) -> GradedRule:
    half = 0.5 * length
    a0 = config.innermost_fraction * length
    edges = [a0]
    while edges[-1] / config.grading_ratio < half:
        edges.append(edges[-1] / config.grading_ratio)
    edges.append(half)
    edges = np.array(edges)

    x, w = np.polynomial.legendre.leggauss(config.panel_order)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x[None, :]
    weights = 0.5 * (hi - lo) * w[None, :]
    return GradedRule(nodes=nodes.ravel(), weights=weights.ravel(), innermost=float(a0),
                      panels=edges.size - 1)


@dataclass(frozen=True)
class CurveStencil:
    """Node points gamma(s_i) and shifted points gamma(s_i + xi_j) of one curve"""
    rule: GradedRule
    outer: np.ndarray  # (n, d)
    inner: np.ndarray  # (n, m, d)


def curve_stencil(curve: Curve, config: Optional[QuadratureConfig] = None) -> CurveStencil:
    """Stencil for the diagonal quadrature, cached on the curve"""
    config = config or curve.config
    key = (config.panel_order, config.grading_ratio, config.innermost_fraction)
    with _stencil_lock:
        cached = curve._stencils.get(key)
    if cached is not None:
        return cached

    rule = graded_rule(curve.length, config)
    shifted = curve.node_s[:, None] + rule.nodes[None, :]
    stencil = CurveStencil(rule=rule, outer=curve.points, inner=curve.eval(shifted))
    with _stencil_lock:
        curve._stencils[key] = stencil
    return stencil


def diagonal_average(
    curve: Curve,
    kernel: Kernel,
    innermost: Optional[Callable[[float], float]] = None,
    config: Optional[QuadratureConfig] = None,
    separation_kernel: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
) -> Tuple[float, float]:
    """(1/L) int ds int ds' k(gamma(s), gamma(s')) with an error estimate.

    The s'-integral runs over the separation xi in (-L/2, L/2], folded onto
    (0, L/2]. ``innermost(a0)`` integrates the kernel over (0, a0]; by default
    the coincidence value times a0. ``separation_kernel(xi, r)``, when given,
    replaces ``kernel`` and receives the separation and geodesic distance.
    """
    stencil = curve_stencil(curve, config)
    rule = stencil.rule
    if separation_kernel is None:
        values = kernel(stencil.outer[:, None, :], stencil.inner)
    else:
        r = curve.manifold.geodesic_distance(stencil.outer[:, None, :], stencil.inner)
        values = separation_kernel(rule.nodes[None, :], r)
    per_node = values @ rule.weights

    if innermost is None:
        coincident = np.mean(kernel(stencil.outer, stencil.outer))
        inner_part = float(coincident) * rule.innermost
    else:
        inner_part = innermost(rule.innermost)

    total = 2.0 * float(np.mean(per_node)) + 2.0 * inner_part
    coarse = 2.0 * float(np.mean(per_node[::2])) + 2.0 * inner_part
    return total, abs(total - coarse)


def pair_average(a: Curve, b: Curve, kernel: Kernel) -> Tuple[float, float]:
    """Mean of k(gamma_a(s), gamma_b(s')) over the node grid, with an error estimate"""
    values = kernel(a.points[:, None, :], b.points[None, :, :])
    total = float(np.mean(values))
    coarse = float(np.mean(values[::2, ::2]))
    return total, abs(total - coarse)
