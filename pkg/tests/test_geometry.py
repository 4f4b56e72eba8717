# tests/test_geometry.py

import math

import numpy as np
import pytest
from scipy.integrate import quad

from curvebound.config.settings import GeometryConfig, QuadratureConfig
from curvebound.errors import CoincidenceError, DomainError, InvalidPointError, SchemaError, TruncationError
from curvebound.geometry import EuclideanPlane, EuclideanSpace3, FlatTorus3, HyperbolicSpace3, create_manifold
from curvebound.types.common import ManifoldKind, UnitsConfig

ORIGIN = np.zeros(3)


def test_units_energy_scale():
    units = UnitsConfig(hbar=2.0, mass=1.0)
    assert units.energy_scale == pytest.approx(2.0)
    assert units.energy_to_canonical(-3.0) == pytest.approx(-1.5)
    assert units.inverse_coupling_from_canonical(units.inverse_coupling_to_canonical(0.7)) == pytest.approx(0.7)
    with pytest.raises(SchemaError):
        UnitsConfig(hbar=0.0)


def test_flat_heat_kernel_symmetry_positivity(space):
    rng = np.random.default_rng(1)
    x, y = rng.normal(size=(10, 3)), rng.normal(size=(10, 3))
    forward = space.heat_kernel(0.3, x, y)
    assert np.all(forward > 0)
    np.testing.assert_allclose(forward, space.heat_kernel(0.3, y, x), rtol=0, atol=0)


@pytest.mark.parametrize("t", [0.05, 1.0, 7.0])
def test_flat_heat_kernel_normalization(space, t):
    upper = 20.0 * math.sqrt(t)
    total, _ = quad(lambda r: 4 * math.pi * r * r * float(space.heat_kernel(t, ORIGIN, [r, 0, 0])),
                    0.0, upper, epsabs=0.0, epsrel=1e-12, limit=200)
    assert total == pytest.approx(1.0, rel=1e-9)


def test_heat_kernel_rejects_nonpositive_time(space):
    with pytest.raises(DomainError):
        space.heat_kernel(0.0, ORIGIN, ORIGIN)


@pytest.mark.parametrize("r", [1e-3, 0.5, 1.0, 3.0])
def test_space_resolvent_matches_time_integral(space, r):
    kappa = 1.3
    closed = space.resolvent_kernel(kappa, ORIGIN, [r, 0, 0])
    numeric = space._time_integral(np.array([r]), kappa * kappa)[0]
    assert closed == pytest.approx(math.exp(-kappa * r) / (4 * math.pi * r), rel=1e-14)
    assert numeric == pytest.approx(closed, rel=1e-7)


def test_resolvent_coincidence_raises(space):
    with pytest.raises(CoincidenceError):
        space.resolvent_kernel(1.0, ORIGIN, ORIGIN)


def test_resolvent_difference_coincidence_limit(space):
    value = space.resolvent_difference(1.0, 3.0, ORIGIN, ORIGIN)
    assert value == pytest.approx(2.0 / (4 * math.pi), rel=1e-14)
    near = space.resolvent_difference(1.0, 3.0, ORIGIN, [1e-9, 0, 0])
    assert near == pytest.approx(value, rel=1e-8)


def test_resolvent_derivative_matches_energy_difference(space):
    E, h, r = -2.0, 1e-5, 0.7
    y = [r, 0, 0]
    g = lambda energy: float(space.resolvent_kernel(math.sqrt(-energy), ORIGIN, y))
    fd = (g(E + h) - g(E - h)) / (2 * h)
    assert float(space.resolvent_derivative(math.sqrt(-E), ORIGIN, y)) == pytest.approx(fd, rel=1e-7)


@pytest.mark.parametrize("r", [0.0, 1e-6, 1e-2, 0.3, 2.0])
def test_space_cutoff_closed_form_matches_time_integral(space, r):
    eps, a = 1e-3, 2.0
    closed = float(space.cutoff_resolvent(eps, a, ORIGIN, [r, 0, 0]))
    numeric = float(space._time_integral(np.array([r]), a, eps=eps)[0])
    assert closed == pytest.approx(numeric, rel=1e-7)


def test_cutoff_tends_to_resolvent(space):
    y = [0.5, 0, 0]
    exact = float(space.resolvent_kernel(1.0, ORIGIN, y))
    errors = [abs(float(space.cutoff_resolvent(eps, 1.0, ORIGIN, y)) - exact) for eps in (1e-2, 1e-3, 1e-4)]
    assert errors[0] > errors[1] > errors[2]


@pytest.mark.parametrize("r", [1e-4, 0.2, 2.0])
def test_plane_resolvent_matches_time_integral(plane, r):
    kappa = 0.8
    closed = float(plane.resolvent_kernel(kappa, [0, 0], [r, 0]))
    numeric = float(plane._time_integral(np.array([r]), kappa * kappa)[0])
    assert numeric == pytest.approx(closed, rel=1e-7)


def test_plane_difference_log_limit(plane):
    value = float(plane.resolvent_difference(1.0, math.e, [0, 0], [0, 0]))
    assert value == pytest.approx(1.0 / (2 * math.pi), rel=1e-14)


def test_plane_derivative_limit(plane):
    kappa = 1.5
    at_zero = float(plane.resolvent_derivative(kappa, [0, 0], [0, 0]))
    assert at_zero == pytest.approx(1.0 / (4 * math.pi * kappa ** 2), rel=1e-14)
    near = float(plane.resolvent_derivative(kappa, [0, 0], [1e-7, 0]))
    assert near == pytest.approx(at_zero, rel=1e-6)


def test_wrong_dimension_rejected(space):
    with pytest.raises(InvalidPointError):
        space.validate_points([1.0, 2.0])


def test_volumes():
    assert math.isinf(EuclideanSpace3().volume)
    assert FlatTorus3([1.0, 2.0, 3.0]).volume == pytest.approx(6.0)
    assert math.isinf(HyperbolicSpace3(2.0).volume)


def test_torus_reduces_and_is_periodic():
    torus = FlatTorus3([2.0, 3.0, 4.0])
    np.testing.assert_allclose(torus.reduce(np.array([2.5, -1.0, 9.0])), [0.5, 2.0, 1.0])
    x, y = np.array([0.1, 0.2, 0.3]), np.array([1.5, 0.7, 3.9])
    k1 = float(torus.heat_kernel(0.5, x, y))
    k2 = float(torus.heat_kernel(0.5, x, y + np.array([2.0, -3.0, 8.0])))
    assert k1 == pytest.approx(k2, rel=1e-12)
    assert float(torus.geodesic_distance(x, y)) == pytest.approx(float(np.linalg.norm([0.6, 0.5, 0.4])))


def test_torus_heat_kernel_long_time_limit():
    torus = FlatTorus3([1.0, 1.0, 1.0])
    value = float(torus.heat_kernel(5.0, [0.1, 0.2, 0.3], [0.7, 0.4, 0.9]))
    assert value == pytest.approx(1.0 / torus.volume, rel=1e-10)


def test_torus_matches_space_for_large_periods(space):
    torus = FlatTorus3([1e3, 1e3, 1e3])
    x, y = np.array([1.0, 2.0, 3.0]), np.array([1.5, 2.5, 2.0])
    assert float(torus.resolvent_kernel(1.0, x, y)) == pytest.approx(float(space.resolvent_kernel(1.0, x, y)), rel=1e-14)
    assert float(torus.resolvent_difference(1.0, 2.0, x, x)) == pytest.approx(1.0 / (4 * math.pi), rel=1e-14)


def test_torus_truncation_error():
    torus = FlatTorus3([1.0, 1.0, 1.0], geometry=GeometryConfig(max_shells=1))
    with pytest.raises(TruncationError) as info:
        torus.heat_kernel(50.0, [0.1, 0.1, 0.1], [0.4, 0.4, 0.4])
    assert info.value.tail_bound > 0


def test_hyperbolic_distance_and_chart():
    h3 = HyperbolicSpace3(2.0)
    x, y = np.array([0.0, 0.0, 1.0]), np.array([0.3, -0.2, 2.5])
    chord2 = float(np.sum((x - y) ** 2))
    expected = 2.0 * math.acosh(1 + chord2 / (2 * x[2] * y[2]))
    assert float(h3.geodesic_distance(x, y)) == pytest.approx(expected, rel=1e-12)
    vertical = float(h3.geodesic_distance([0, 0, 1.0], [0, 0, math.e]))
    assert vertical == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(InvalidPointError):
        h3.heat_kernel(1.0, [0, 0, -1.0], x)


@pytest.mark.parametrize("R", [1.0, 3.0])
def test_hyperbolic_resolvent_matches_closed_form(R):
    h3 = HyperbolicSpace3(R)
    kappa = 0.9
    x, y = np.array([0.0, 0.0, 1.0]), np.array([0.4, 0.1, 1.7])
    r = float(h3.geodesic_distance(x, y))
    m = math.sqrt(kappa * kappa + 1.0 / (R * R))
    expected = math.exp(-m * r) / (4 * math.pi * R * math.sinh(r / R))
    assert float(h3.resolvent_kernel(kappa, x, y)) == pytest.approx(expected, rel=1e-7)


def test_hyperbolic_heat_kernel_flat_limit(space):
    h3 = HyperbolicSpace3(1e4)
    x, y = np.array([0.0, 0.0, 1e4]), np.array([1.0, 0.0, 1e4])
    assert float(h3.heat_kernel(0.5, x, y)) == pytest.approx(float(space.heat_kernel(0.5, x, y)), rel=1e-6)


def test_create_manifold_dispatch():
    assert create_manifold({"kind": "EuclideanPlane"}).kind is ManifoldKind.EUCLIDEAN_PLANE
    torus = create_manifold({"kind": "FlatTorus3", "periods": [1, 2, 3]}, quadrature=QuadratureConfig())
    assert torus.describe()["periods"] == [1.0, 2.0, 3.0]
    with pytest.raises(SchemaError):
        create_manifold({"kind": "Sphere2"})
    with pytest.raises(SchemaError):
        create_manifold({"kind": "FlatTorus3"})


@pytest.mark.parametrize("manifold", [HyperbolicSpace3(1.0), FlatTorus3([2.0, 2.0, 2.0]), EuclideanSpace3()],
                         ids=["hyperbolic", "torus", "space"])
def test_geodesic_distance_validates_points(manifold):
    with pytest.raises(InvalidPointError):
        manifold.geodesic_distance([0.0, 0.0, 1.0], [0.0, 0.0, math.nan])
    with pytest.raises(InvalidPointError):
        manifold.geodesic_distance([0.0, 0.0, 1.0], [0.0, 1.0])


def test_hyperbolic_distance_rejects_points_below_the_boundary():
    h3 = HyperbolicSpace3(1.0)
    with pytest.raises(InvalidPointError):
        h3.geodesic_distance([0.0, 0.0, -1.0], [0.0, 0.0, 1.0])
    with pytest.raises(InvalidPointError):
        h3.geodesic_distance([0.0, 0.0, 0.0], [0.0, 0.0, 1.0])


# Semigroup: int K_t(x, z) K_s(z, y) dz = K_{t+s}(x, y)


def test_plane_heat_kernel_semigroup(plane):
    axis = np.linspace(-9.0, 9.0, 181)
    h = axis[1] - axis[0]
    z = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
    x, y = np.array([0.3, -0.2]), np.array([-0.5, 0.4])
    t, s = 0.4, 0.7
    composed = float(np.sum(plane.heat_kernel(t, x, z) * plane.heat_kernel(s, z, y)) * h * h)
    assert composed == pytest.approx(float(plane.heat_kernel(t + s, x, y)), rel=1e-10)


def test_torus_heat_kernel_semigroup():
    torus = FlatTorus3([2.0, 2.0, 2.0])
    n = 32
    axis = (np.arange(n) + 0.5) * (2.0 / n)
    z = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    x, y = np.array([0.2, 0.5, 1.9]), np.array([1.6, 0.1, 0.7])
    t, s = 0.15, 0.25
    composed = float(np.sum(torus.heat_kernel(t, x, z) * torus.heat_kernel(s, z, y)) * (2.0 / n) ** 3)
    assert composed == pytest.approx(float(torus.heat_kernel(t + s, x, y)), rel=1e-9)


# Scaling: K_{tau^2 t}(tau x, tau y) = tau^{-d} K_t(x, y) with the geometry scaled by tau


@pytest.mark.parametrize("tau", [0.5, 2.0, 10.0])
def test_flat_heat_kernel_scaling(space, plane, tau):
    rng = np.random.default_rng(3)
    for manifold in (space, plane):
        d = manifold.dimension
        x, y = rng.normal(size=(6, d)), rng.normal(size=(6, d))
        scaled = manifold.heat_kernel(tau * tau * 0.7, tau * x, tau * y)
        np.testing.assert_allclose(scaled, tau ** -d * manifold.heat_kernel(0.7, x, y), rtol=1e-12)


@pytest.mark.parametrize("tau", [0.5, 2.0, 10.0])
def test_torus_heat_kernel_scaling(tau):
    base = FlatTorus3([1.0, 1.5, 2.0])
    scaled_torus = FlatTorus3([tau * 1.0, tau * 1.5, tau * 2.0])
    x, y = np.array([0.1, 0.2, 0.3]), np.array([0.8, 1.1, 1.7])
    for t in (0.05, 0.5):
        scaled = float(scaled_torus.heat_kernel(tau * tau * t, tau * x, tau * y))
        assert scaled == pytest.approx(tau ** -3 * float(base.heat_kernel(t, x, y)), rel=1e-10)


@pytest.mark.parametrize("tau", [0.5, 2.0, 10.0])
def test_hyperbolic_heat_kernel_scaling(tau):
    # the same chart points are tau times further apart when the curvature scale grows by tau
    base, scaled_space = HyperbolicSpace3(1.0), HyperbolicSpace3(tau)
    x, y = np.array([0.0, 0.0, 1.0]), np.array([0.4, -0.3, 1.6])
    for t in (0.1, 1.0):
        scaled = float(scaled_space.heat_kernel(tau * tau * t, x, y))
        assert scaled == pytest.approx(tau ** -3 * float(base.heat_kernel(t, x, y)), rel=1e-12)
