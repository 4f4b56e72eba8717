from .common import CheckResult, CurveKind, ManifoldKind, QuadratureReport, SchemeKind, UnitsConfig
from .schemes import BoundState3D, Finite2D, Regularized, RGSubtracted, Scheme
from .spectral import (
    EigenFlow,
    FlowConstant,
    GershgorinBound,
    GershgorinRow,
    PositivityReport,
    RGState,
    ScalingReport,
    SpectralSolution,
    Wavefunction,
)

__all__ = [
    "BoundState3D",
    "CheckResult",
    "CurveKind",
    "EigenFlow",
    "Finite2D",
    "FlowConstant",
    "GershgorinBound",
    "GershgorinRow",
    "ManifoldKind",
    "PositivityReport",
    "QuadratureReport",
    "Regularized",
    "RGState",
    "RGSubtracted",
    "ScalingReport",
    "Scheme",
    "SchemeKind",
    "SpectralSolution",
    "UnitsConfig",
    "Wavefunction",
]
