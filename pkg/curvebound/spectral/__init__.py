# spectral/__init__.py
from .bounds import analytic_lower_bound, bound_holds, gershgorin_disks, gershgorin_lower_bound, gershgorin_margin
from .flow import eigen_flow, excited_crossings, fix_signs
from .solver import bracket_ground_state, positivity_check, predicted_binding_shift, solve_ground_state
from .wavefunction import grid_points, ground_state_wavefunction, l2_normalization

__all__ = [
    "analytic_lower_bound",
    "bound_holds",
    "bracket_ground_state",
    "eigen_flow",
    "excited_crossings",
    "fix_signs",
    "gershgorin_disks",
    "gershgorin_lower_bound",
    "gershgorin_margin",
    "grid_points",
    "ground_state_wavefunction",
    "l2_normalization",
    "positivity_check",
    "predicted_binding_shift",
    "solve_ground_state",
]
