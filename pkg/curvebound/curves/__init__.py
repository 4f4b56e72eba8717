from .certificates import self_gap
from .curve import Curve, CurveFrenetData, SelfGapCertificate, build_curve
from .io import read_point_table
from .specs import Circle2, Circle3, CircleH3, CurveSpec, Ellipse3, Sampled, TorusKnot, curve_spec_from_dict
from .system import CurveSystem, pairwise_distances

__all__ = [
    "Circle2",
    "Circle3",
    "CircleH3",
    "Curve",
    "CurveFrenetData",
    "CurveSpec",
    "CurveSystem",
    "Ellipse3",
    "Sampled",
    "SelfGapCertificate",
    "TorusKnot",
    "build_curve",
    "curve_spec_from_dict",
    "pairwise_distances",
    "read_point_table",
    "self_gap",
]
