# tests/test_curves.py

import math

import numpy as np
import pytest
from scipy.special import ellipe

from curvebound.config.settings import CurveboundConfig
from curvebound.curves import (
    Circle2,
    Circle3,
    CircleH3,
    CurveSystem,
    Ellipse3,
    Sampled,
    TorusKnot,
    build_curve,
    curve_spec_from_dict,
    read_point_table,
)
from curvebound.curves.curve import ARCLENGTH_TOL
from curvebound.curves.system import pairwise_distances
from curvebound.errors import (
    ClosureError,
    DomainError,
    GeometryViolationError,
    IntersectionError,
    SchemaError,
    SchemeError,
)
from curvebound.geometry import FlatTorus3, HyperbolicSpace3
from curvebound.types.schemes import BoundState3D, Finite2D


def _circle_points(n, radius=1.0, z=0.0):
    phi = 2 * np.pi * np.arange(n) / n
    return tuple((radius * math.cos(p), radius * math.sin(p), z) for p in phi)


def test_unit_circle_geometry(unit_circle):
    assert unit_circle.length == pytest.approx(2 * math.pi, rel=1e-12)
    assert unit_circle.arclength_error < ARCLENGTH_TOL
    frenet = unit_circle.frenet
    np.testing.assert_allclose(frenet.kappa_g, 1.0, rtol=1e-8)
    np.testing.assert_allclose(frenet.tau, 0.0, atol=1e-8)
    assert frenet.orthonormality_error() < 1e-10
    # principal normals point at the centre
    np.testing.assert_allclose(frenet.normals, -unit_circle.points, atol=1e-8)


def test_eval_is_periodic(unit_circle):
    s = np.linspace(0.0, 1.0, 7)
    np.testing.assert_allclose(unit_circle.eval(s + unit_circle.length), unit_circle.eval(s), atol=1e-12)


def test_ellipse_length(space):
    curve = build_curve(Ellipse3(a=2.0, b=1.0), space, 256)
    assert curve.length == pytest.approx(8.0 * ellipe(0.75), rel=1e-10)
    assert curve.frenet.kappa_g_max == pytest.approx(2.0, rel=1e-6)


def test_torus_knot_is_embedded(space):
    curve = build_curve(TorusKnot(p=2, q=3, major=2.0, minor=0.75), space, 512)
    assert curve.self_gap.Delta > 0
    assert curve.self_gap.delta <= curve.length / 4
    assert np.all(curve.frenet.kappa_g > 0)


def test_hyperbolic_circle_length_and_curvature():
    h3 = HyperbolicSpace3(1.0)
    curve = build_curve(CircleH3(radius=1.0, center=(0.0, 0.0, 1.0)), h3, 128)
    assert curve.length == pytest.approx(2 * math.pi * math.sinh(1.0), rel=1e-8)
    np.testing.assert_allclose(curve.frenet.kappa_g, 1.0 / math.tanh(1.0), rtol=1e-6)


def test_self_gap_sandwich_on_circle(unit_circle):
    gap = unit_circle.self_gap
    assert 0 < gap.delta <= unit_circle.length / 4
    assert gap.factor == pytest.approx(math.sqrt(1.0 - gap.delta), rel=1e-6)
    assert gap.Delta == pytest.approx(2.0 * math.sin(gap.delta / 2.0), rel=1e-8)
    assert gap.min_ratio >= gap.factor


def test_scaled_curve(unit_circle):
    bigger = unit_circle.scaled(2.0)
    assert bigger.length == pytest.approx(4 * math.pi, rel=1e-12)
    assert unit_circle.scaled(1.0) is unit_circle
    with pytest.raises(DomainError):
        unit_circle.scaled(-1.0)


def test_scaling_refused_off_flat_space():
    h3 = HyperbolicSpace3(1.0)
    curve = build_curve(CircleH3(radius=0.5), h3, 64)
    with pytest.raises(DomainError):
        curve.scaled(2.0)


def test_sampled_circle_matches_exact(space):
    curve = build_curve(Sampled(points=_circle_points(64)), space, 128)
    assert curve.length == pytest.approx(2 * math.pi, rel=1e-5)
    assert curve.parametrization_error < 1e-3


def test_sampled_with_repeated_closing_point(space):
    points = _circle_points(64)
    curve = build_curve(Sampled(points=points + (points[0],)), space, 128)
    assert curve.length == pytest.approx(2 * math.pi, rel=1e-5)


def test_open_sample_is_rejected():
    arc = _circle_points(64)[:40]
    with pytest.raises(ClosureError):
        Sampled(points=arc).validated_points()


def test_repeated_sample_is_rejected():
    points = list(_circle_points(32))
    points.insert(5, points[4])
    with pytest.raises(GeometryViolationError):
        Sampled(points=tuple(points)).validated_points()


def test_too_few_samples():
    with pytest.raises(SchemaError):
        Sampled(points=_circle_points(8)).validated_points()


def test_node_floor(space):
    with pytest.raises(SchemaError):
        build_curve(Circle3(radius=1.0), space, 16)


def test_curve_kind_must_match_manifold(space):
    with pytest.raises(SchemaError):
        build_curve(Circle2(radius=1.0), space, 64)


def test_triangle_distances(triangle):
    d = triangle.distances
    assert np.all(np.isnan(np.diag(d)))
    assert d[0, 1] == pytest.approx(3.0, rel=1e-9)
    assert d[1, 2] == pytest.approx(4.0, rel=1e-9)
    assert d[0, 2] == pytest.approx(5.0, rel=1e-9)
    np.testing.assert_array_equal(d, d.T)
    np.testing.assert_array_equal(pairwise_distances(triangle), d)


def test_coaxial_distance(pair):
    assert pair.distances[0, 1] == pytest.approx(3.0, rel=1e-12)
    np.testing.assert_allclose(pair.lengths, 2 * math.pi)


def test_intersecting_circles_raise(space):
    curves = [
        build_curve(Circle3(radius=1.0), space, 128),
        build_curve(Circle3(radius=1.0, center=(1.0, 0.0, 0.0)), space, 128),
    ]
    with pytest.raises(IntersectionError):
        CurveSystem(space, curves, BoundState3D(nu=(1.0, 1.0)), CurveboundConfig())


def test_with_scheme_reuses_distances(pair):
    other = pair.with_scheme(BoundState3D(nu=(2.0, 2.0)))
    assert other.distances is pair.distances
    assert other.scheme.nu == (2.0, 2.0)


def test_scheme_dimension_mismatch(pair):
    with pytest.raises(SchemeError):
        pair.with_scheme(Finite2D(couplings=(1.0, 1.0)))


def test_spec_from_dict():
    spec = curve_spec_from_dict({"kind": "Circle3", "radius": 2, "center": [1, 0, 0]})
    assert spec == Circle3(radius=2.0, center=(1.0, 0.0, 0.0))
    with pytest.raises(SchemaError) as info:
        curve_spec_from_dict({"kind": "TorusKnot", "p": 2, "q": 4, "major": 2, "minor": 1}, prefix="curves[0]")
    assert info.value.field == "curves[0].p"
    with pytest.raises(SchemaError) as info:
        curve_spec_from_dict({"kind": "Helix"})
    assert info.value.field == "curve.kind"
    with pytest.raises(SchemaError):
        curve_spec_from_dict({"kind": "Circle3", "radius": -1})


def test_read_point_table(tmp_path):
    path = tmp_path / "loop.dat"
    path.write_text("# x y z\n1 0 0\n0 1 0  # second\n\n-1 0 0\n", encoding="utf-8")
    np.testing.assert_allclose(read_point_table(path), [[1, 0, 0], [0, 1, 0], [-1, 0, 0]])

    path.write_text("1 0 0\n0 1\n", encoding="utf-8")
    with pytest.raises(SchemaError) as info:
        read_point_table(path)
    assert info.value.line == 2


def test_degenerate_orientation_is_a_schema_error(space):
    with pytest.raises(SchemaError) as info:
        build_curve(Ellipse3(a=2.0, b=1.0, normal=(0.0, 0.0, 1.0), major_axis=(0.0, 0.0, 3.0)), space, 64)
    assert info.value.field == "major_axis"
    with pytest.raises(SchemaError) as info:
        build_curve(Circle3(normal=(0.0, 0.0, 0.0)), space, 64)
    assert info.value.exit_code == 2


def test_torus_nodes_lie_in_fundamental_domain():
    torus = FlatTorus3([10.0, 10.0, 10.0])
    curve = build_curve(Circle3(radius=1.0, center=(0.0, 0.0, 0.0)), torus, 64)
    assert np.all(curve.points >= 0.0) and np.all(curve.points < 10.0)
    assert np.any(curve.points[:, 0] > 8.0)
    assert curve.length == pytest.approx(2 * math.pi, rel=1e-10)
    other = build_curve(Circle3(radius=1.0, center=(0.0, 0.0, 3.0)), torus, 64)
    system = CurveSystem(torus, [curve, other], BoundState3D(nu=(1.0, 1.0)), CurveboundConfig())
    assert system.distances[0, 1] == pytest.approx(3.0, rel=1e-9)
