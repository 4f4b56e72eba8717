# curves/certificates.py

import logging
import math
from typing import TYPE_CHECKING

import numpy as np

from ..errors import GeometryViolationError, ResolutionError
from .curve import SelfGapCertificate

if TYPE_CHECKING:
    from .curve import Curve

logger = logging.getLogger(__name__)

# Relative slack allowed in d_g <= xi before it counts as a violation
_UPPER_SLACK = 1e-9
# delta stays strictly inside the admissible window 1 / (2 kappa_g*)
_WINDOW_FRACTION = 0.99


def self_gap(curve: "Curve") -> SelfGapCertificate:
    """Certify the arclength/geodesic-distance sandwich of a curve at node resolution.

    Returns the largest delta <= min(L/4, 0.99/(2 kappa_g*)) for which
    sqrt(1 - kappa_g* delta) * xi <= d_g holds at every node pair with
    xi <= delta, and the largest Delta with d_g >= Delta beyond delta.
    """
    n = curve.nodes
    length = curve.length
    h = curve.node_spacing
    kappa_max = curve.frenet.kappa_g_max
    manifold = curve.manifold

    cap = length / 4.0
    if kappa_max > 0:
        cap = min(cap, _WINDOW_FRACTION / (2.0 * kappa_max))
    if h > cap:
        raise ResolutionError(
            f"node spacing {h:.3e} exceeds the admissible near-regime radius {cap:.3e}; "
            f"increase nodes above {math.ceil(length / cap)}"
        )

    points = curve.points
    half = n // 2
    separations = np.arange(1, half + 1)
    xi = np.minimum(separations, n - separations) * h
    min_dist = np.empty(half)
    ratio = np.empty(half)
    for idx, k in enumerate(separations):
        d = manifold.geodesic_distance(points, np.roll(points, -k, axis=0))
        min_dist[idx] = d.min()
        ratio[idx] = d.min() / xi[idx]
        if d.max() > xi[idx] * (1.0 + _UPPER_SLACK) + 1e-12 * length:
            raise GeometryViolationError(
                f"geodesic distance {d.max():.12g} exceeds arclength separation {xi[idx]:.12g}; "
                "the curve is not arclength parametrized"
            )

    prefix_ratio = np.minimum.accumulate(ratio)
    candidates = np.append(xi[xi <= cap], cap)
    best = None
    for delta in np.unique(candidates)[::-1]:
        inside = int(np.searchsorted(xi, delta, side="right"))
        factor = math.sqrt(max(0.0, 1.0 - kappa_max * delta))
        if inside == 0 or prefix_ratio[inside - 1] >= factor:
            best = (float(delta), factor, inside)
            break
    if best is None:
        raise ResolutionError("no admissible delta at node resolution; increase the node count")
    delta, factor, inside = best

    shifted = curve.eval(curve.node_s + delta)
    Delta = float(manifold.geodesic_distance(points, shifted).min())
    if inside < half:
        Delta = min(Delta, float(min_dist[inside:].min()))
    if Delta < h:
        raise GeometryViolationError(
            f"curve comes within {Delta:.3e} of itself, below the node spacing {h:.3e}; "
            "it self-intersects at node resolution"
        )

    certificate = SelfGapCertificate(
        delta=delta,
        Delta=Delta,
        factor=factor,
        kappa_g_max=kappa_max,
        min_ratio=float(prefix_ratio[max(inside - 1, 0)]),
        node_spacing=h,
    )
    logger.debug(f"Self-gap certificate: {certificate}")
    return certificate
