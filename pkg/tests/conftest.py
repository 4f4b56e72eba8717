# tests/conftest.py

from pathlib import Path

import pytest

from curvebound.config.settings import CurveboundConfig, QuadratureConfig
from curvebound.curves import Circle2, Circle3, CurveSystem, build_curve
from curvebound.geometry import EuclideanPlane, EuclideanSpace3
from curvebound.types.schemes import BoundState3D

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: brute-force oracles that take more than a few seconds")


@pytest.fixture
def quadrature():
    return QuadratureConfig()


@pytest.fixture
def space():
    return EuclideanSpace3()


@pytest.fixture
def plane():
    return EuclideanPlane()


@pytest.fixture
def unit_circle(space, quadrature):
    return build_curve(Circle3(radius=1.0), space, 256, quadrature)


@pytest.fixture
def planar_circle(plane, quadrature):
    return build_curve(Circle2(radius=1.0), plane, 256, quadrature)


def coaxial_pair(manifold, separation, nu=(1.0, 1.0), nodes=256):
    curves = [
        build_curve(Circle3(radius=1.0, center=(0.0, 0.0, 0.0)), manifold, nodes),
        build_curve(Circle3(radius=1.0, center=(0.0, 0.0, separation)), manifold, nodes),
    ]
    return CurveSystem(manifold, curves, BoundState3D(nu=tuple(nu)), CurveboundConfig())


def triangle_of_circles(manifold, nu=(1.0, 1.2, 0.9), nodes=256):
    """Coplanar unit circles at mutual distances 3, 4 and 5"""
    centers = [(0.0, 0.0, 0.0), (5.0, 0.0, 0.0), (3.8, 5.878775382679627, 0.0)]
    curves = [build_curve(Circle3(radius=1.0, center=c), manifold, nodes) for c in centers]
    return CurveSystem(manifold, curves, BoundState3D(nu=tuple(nu)), CurveboundConfig())


@pytest.fixture
def pair(space):
    return coaxial_pair(space, 3.0)


@pytest.fixture
def triangle(space):
    return triangle_of_circles(space)
