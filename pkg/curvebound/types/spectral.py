# types/spectral.py

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..errors import DomainError


@dataclass
class EigenFlow:
    """Eigenvalues of Phi(E) over an energy grid"""
    energies: np.ndarray  # shape (M,)
    eigenvalues: np.ndarray  # shape (M, N), ascending per row
    slopes: np.ndarray  # shape (M, N), A . dPhi/dE . A per sorted level
    eigenvectors: np.ndarray  # shape (M, N, N), columns match eigenvalues
    tracks: np.ndarray  # shape (M, N), sorted index of track k at grid point m
    crossings: List[Tuple[int, int, int]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def tracked_eigenvalues(self) -> np.ndarray:
        return np.take_along_axis(self.eigenvalues, self.tracks, axis=1)

    @property
    def tracked_slopes(self) -> np.ndarray:
        return np.take_along_axis(self.slopes, self.tracks, axis=1)


@dataclass
class SpectralSolution:
    """Ground state of the principal operator"""
    energy: float
    vector: np.ndarray
    omega_slope: float
    normalization: float
    bracket: Tuple[float, float]
    residual: float
    gap: Optional[float]
    evaluations: int = 0
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "E_gr": self.energy,
            "A0": [float(a) for a in self.vector],
            "omega_slope": self.omega_slope,
            "normalization": self.normalization,
            "bracket": [self.bracket[0], self.bracket[1]],
            "residual": self.residual,
            "gap": self.gap,
            "evaluations": self.evaluations,
            "warnings": list(self.warnings),
        }


@dataclass
class GershgorinRow:
    energy: float
    margin: float  # min_i [Phi_ii - sum_j |Phi_ij|]
    min_diagonal: float
    max_row_sum: float


@dataclass
class GershgorinBound:
    """Energy below which every Gershgorin disk of Phi(E) excludes zero"""
    e_star: float
    certificate: List[GershgorinRow]
    analytic_estimate: Optional[float] = None
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "E_star": self.e_star,
            "analytic_E_star": self.analytic_estimate,
            "certificate": [
                {
                    "E": row.energy,
                    "margin": row.margin,
                    "min_diagonal": row.min_diagonal,
                    "max_row_sum": row.max_row_sum,
                }
                for row in self.certificate
            ],
            "warnings": list(self.warnings),
        }


@dataclass
class PositivityReport:
    offdiag_negative: bool
    vector_positive: bool
    max_offdiag: Optional[float]
    min_component: float
    gap: Optional[float]
    passed: bool
    unresolved_components: int = 0
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "offdiag_negative": self.offdiag_negative,
            "vector_positive": self.vector_positive,
            "max_offdiag": self.max_offdiag,
            "min_component": self.min_component,
            "gap": self.gap,
            "passed": self.passed,
            "unresolved_components": self.unresolved_components,
            "warnings": list(self.warnings),
        }


@dataclass
class Wavefunction:
    """Ground-state wavefunction samples at a set of points"""
    points: np.ndarray
    values: np.ndarray
    near_support: np.ndarray
    l2_factor: Optional[float] = None
    warnings: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class RGState:
    """Renormalized coupling at a reference scale"""
    lambda_R: float
    mu: float
    length: float
    constant: float

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError(f"mu must be positive, got {self.mu}")
        if not self.length > 0:
            raise DomainError(f"length must be positive, got {self.length}")
        if not self.constant > 0:
            raise DomainError(f"flow constant must be positive, got {self.constant}")


@dataclass
class FlowConstant:
    value: float
    error: float


@dataclass
class ScalingReport:
    tau: float
    energy: float
    lhs: float
    rhs: float
    discrepancy: float
    flowed_coupling: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tau": self.tau,
            "E": self.energy,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "discrepancy": self.discrepancy,
            "flowed_lambda_R": self.flowed_coupling,
        }
