from ..types.schemes import BoundState3D, Finite2D, Regularized, RGSubtracted, Scheme
from .principal import (
    PrincipalMatrix,
    bare_inverse_coupling,
    coupling_for_binding,
    diagonal_lower_bound,
    offdiag_envelope,
    phi_derivative,
    phi_diag_boundstate,
    phi_diag_renormalized,
    phi_finite2d,
    phi_offdiag,
    phi_regularized,
    phi_rg_subtracted,
)
from .quadrature import CurveStencil, GradedRule, curve_stencil, diagonal_average, graded_rule, pair_average

__all__ = [
    "BoundState3D",
    "CurveStencil",
    "Finite2D",
    "GradedRule",
    "PrincipalMatrix",
    "Regularized",
    "RGSubtracted",
    "Scheme",
    "bare_inverse_coupling",
    "coupling_for_binding",
    "curve_stencil",
    "diagonal_average",
    "diagonal_lower_bound",
    "graded_rule",
    "offdiag_envelope",
    "pair_average",
    "phi_derivative",
    "phi_diag_boundstate",
    "phi_diag_renormalized",
    "phi_finite2d",
    "phi_offdiag",
    "phi_regularized",
    "phi_rg_subtracted",
]
