# tests/test_scenario.py

import copy
import json
import math

import numpy as np
import pytest

from curvebound.errors import SchemaError
from curvebound.scenario import RunRecord, energy_grid, load_scenario, parse_scenario
from curvebound.types.common import SchemeKind, UnitsConfig
from curvebound.types.schemes import Finite2D, Regularized, RGSubtracted

from conftest import SCENARIO_DIR

PAIR = {
    "name": "pair",
    "manifold": {"kind": "EuclideanSpace3"},
    "scheme": {"kind": "BoundState3D"},
    "curves": [
        {"kind": "Circle3", "radius": 1.0, "center": [0, 0, 0], "nu": 1.0},
        {"kind": "Circle3", "radius": 1.0, "center": [0, 0, 3], "nu": 1.0, "nodes": 128},
    ],
}


def _with(**changes):
    data = copy.deepcopy(PAIR)
    data.update(changes)
    return data


def test_parse_pair():
    scenario = parse_scenario(copy.deepcopy(PAIR))
    assert scenario.name == "pair"
    assert scenario.scheme_kind is SchemeKind.BOUND_STATE_3D
    assert scenario.curve_data[1] == {"nu": 1.0, "nodes": 128}
    system = scenario.build_system()
    assert system.scheme.nu == (1.0, 1.0)
    assert [c.nodes for c in system.curves] == [256, 128]
    assert system.distances[0, 1] == pytest.approx(3.0)


def test_sha256_is_key_order_independent():
    reordered = json.loads(json.dumps(PAIR, sort_keys=True))
    assert parse_scenario(copy.deepcopy(PAIR)).sha256 == parse_scenario(reordered).sha256
    assert parse_scenario(_with(name="other")).sha256 != parse_scenario(copy.deepcopy(PAIR)).sha256


@pytest.mark.parametrize(
    "changes, field",
    [
        ({"extra": 1}, "scenario"),
        ({"manifold": {"kind": "Sphere"}}, "manifold.kind"),
        ({"scheme": {"kind": "Nope"}}, "scheme.kind"),
        ({"units": {"hbar": -1.0}}, "units.hbar"),
        ({"curves": []}, "curves"),
        ({"solver": {"bogus": 1}}, "solver.bogus"),
        ({"manifold": {"kind": "FlatTorus3", "periods": [1, 2]}}, "manifold.periods"),
    ],
)
def test_schema_errors_name_the_field(changes, field):
    with pytest.raises(SchemaError) as info:
        parse_scenario(_with(**changes))
    assert info.value.field == field


def test_missing_nu():
    data = _with()
    del data["curves"][1]["nu"]
    with pytest.raises(SchemaError) as info:
        parse_scenario(data)
    assert info.value.field == "curves[1].nu"


def test_planar_scheme_on_space_is_rejected():
    with pytest.raises(SchemaError) as info:
        parse_scenario(_with(scheme={"kind": "Finite2D"}))
    assert info.value.field == "scheme.kind"
    assert info.value.exit_code == 2


def test_curve_kind_must_fit_manifold():
    data = _with(manifold={"kind": "EuclideanPlane"}, scheme={"kind": "Finite2D"})
    with pytest.raises(SchemaError):
        parse_scenario(data)


def test_solver_block_maps_sections_and_units():
    data = _with(units={"hbar": 1.0, "mass": 1.0}, solver={"nodes": 64, "e_min": -100.0, "max_shells": 8})
    scenario = parse_scenario(data)
    assert scenario.config.quadrature.nodes == 64
    assert scenario.config.geometry.max_shells == 8
    # energy unit is hbar^2 / 2m = 1/2
    assert scenario.config.solver.e_min == pytest.approx(-200.0)


def test_rg_scheme_in_physical_units():
    data = {
        "manifold": {"kind": "EuclideanSpace3"},
        "units": {"hbar": 2.0, "mass": 1.0},
        "scheme": {"kind": "RGSubtracted", "lambda_R": 4.0, "mu": 1.5},
        "curves": [{"kind": "Circle3", "radius": 1.0}],
    }
    scenario = parse_scenario(data)
    scheme = scenario.build_system().scheme
    assert isinstance(scheme, RGSubtracted)
    assert scheme.mu == 1.5
    assert scheme.inverse_coupling == pytest.approx(0.25 * 2.0)


def test_on_shell_lambda_is_infinite():
    data = {
        "manifold": {"kind": "EuclideanSpace3"},
        "scheme": {"kind": "RGSubtracted", "lambda_R": "inf", "mu": 1.0},
        "curves": [{"kind": "Circle3", "radius": 1.0}],
    }
    assert parse_scenario(data).inverse_lambda_R == 0.0
    data["scheme"]["lambda_R"] = 0
    with pytest.raises(SchemaError) as info:
        parse_scenario(data)
    assert info.value.field == "scheme.lambda_R"


def test_rg_scheme_takes_one_curve():
    data = _with(scheme={"kind": "RGSubtracted", "lambda_R": 1.0, "mu": 1.0})
    with pytest.raises(SchemaError) as info:
        parse_scenario(data)
    assert info.value.field == "curves"


def test_regularized_scheme_variants():
    explicit = parse_scenario(_with(scheme={"kind": "Regularized", "eps": 1e-4, "inverse_couplings": [0.1, 0.2]}))
    scheme = explicit.build_system().scheme
    assert isinstance(scheme, Regularized)
    assert scheme.inverse_couplings == (0.1, 0.2)

    prescribed = parse_scenario(_with(scheme={"kind": "Regularized", "eps": 1e-4, "lambda_R": 2.0, "mu": 1.0}))
    scheme = prescribed.build_system().scheme
    assert len(scheme.inverse_couplings) == 2
    assert all(v > 0.5 for v in scheme.inverse_couplings)

    with pytest.raises(SchemaError):
        parse_scenario(_with(scheme={"kind": "Regularized", "eps": 1e-4, "inverse_couplings": [0.1]}))


def test_planar_coupling_from_binding_wavenumber():
    data = {
        "manifold": {"kind": "EuclideanPlane"},
        "scheme": {"kind": "Finite2D"},
        "curves": [{"kind": "Circle2", "radius": 1.0, "nu": 0.5}],
    }
    scheme = parse_scenario(data).build_system().scheme
    assert isinstance(scheme, Finite2D)
    assert scheme.couplings[0] > 0


def test_load_scenario_reports_lines(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "manifold": {"kind": "EuclideanSpace3"},\n  "scheme": {"kind": "BoundState3D"},\n'
                    '  "curves": [\n    {"kind": "Circle3", "radius": -2, "nu": 1}\n  ]\n}\n', encoding="utf-8")
    with pytest.raises(SchemaError) as info:
        load_scenario(path)
    assert info.value.line == 5

    path.write_text('{\n  "manifold": {\n}', encoding="utf-8")
    with pytest.raises(SchemaError) as info:
        load_scenario(path)
    assert info.value.line is not None


def test_sampled_curve_file_is_relative_to_scenario(tmp_path):
    phi = 2 * np.pi * np.arange(48) / 48
    rows = "\n".join(f"{math.cos(p):.17g} {math.sin(p):.17g} 0" for p in phi)
    (tmp_path / "loop.dat").write_text(rows + "\n", encoding="utf-8")
    path = tmp_path / "sampled.json"
    path.write_text(json.dumps({
        "manifold": {"kind": "EuclideanSpace3"},
        "scheme": {"kind": "BoundState3D"},
        "curves": [{"kind": "Sampled", "file": "loop.dat", "nu": 1.0}],
    }), encoding="utf-8")
    scenario = load_scenario(path)
    assert scenario.name == "sampled"
    assert len(scenario.curves[0].points) == 48


@pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.json")), ids=lambda p: p.stem)
def test_bundled_scenarios_parse(path):
    scenario = load_scenario(path)
    assert scenario.name == path.stem


def test_energy_grid():
    units = UnitsConfig(hbar=1.0, mass=1.0)
    grid = energy_grid({"E_min": -2.0, "E_max": -0.5, "points": 4}, units, -1.0)
    np.testing.assert_allclose(grid, [-4.0, -3.0, -2.0, -1.0])
    default = energy_grid({}, UnitsConfig(), -1.0)
    assert default.size == 50
    assert default[0] == -4.0 and default[-1] == -0.25
    with pytest.raises(SchemaError):
        energy_grid({"E_min": -1.0, "E_max": 1.0}, UnitsConfig(), -1.0)


def test_run_record_serializes_non_finite_values():
    scenario = parse_scenario(copy.deepcopy(PAIR))
    record = RunRecord("solve", scenario, results={"E": -1.5, "gap": math.nan, "bound": -math.inf},
                       warnings=["b", "a", "b"])
    data = record.to_dict()
    assert data["scenario_sha256"] == scenario.sha256
    assert data["results"] == {"E": -1.5, "gap": None, "bound": "-inf"}
    assert data["warnings"] == ["a", "b"]
    json.dumps(data, allow_nan=False)
