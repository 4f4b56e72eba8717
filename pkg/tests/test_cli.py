# tests/test_cli.py

import csv
import json
import math

import pytest

from curvebound.cli import build_parser, main

from conftest import SCENARIO_DIR


def _run(command, scenario, out, *extra):
    return main([command, "--scenario", str(scenario), "--out", str(out), *extra])


def _read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def _read_csv(path):
    with path.open(newline="", encoding="utf-8") as f:
        return list(csv.reader(line for line in f if not line.startswith("#")))


def _write_scenario(tmp_path, data, name="custom"):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_parser_requires_scenario():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["solve"])
    args = build_parser().parse_args(["check", "--scenario", "a.json", "--seed", "3", "-v"])
    assert args.seed == 3 and args.verbose


def test_solve_single_circle(tmp_path):
    assert _run("solve", SCENARIO_DIR / "single_circle.json", tmp_path) == 0
    record = _read_json(tmp_path / "single_circle.solve.json")
    assert record["command"] == "solve"
    assert len(record["scenario_sha256"]) == 64
    ground = record["results"]["ground_state"]
    assert ground["E_gr"] == -1.0
    assert ground["A0"] == [1.0]
    assert ground["omega_slope"] < 0
    assert "gershgorin" not in record["certificates"]


def test_solve_pair_writes_certificates(tmp_path):
    assert _run("solve", SCENARIO_DIR / "two_circles.json", tmp_path, "--quadrature-report") == 0
    record = _read_json(tmp_path / "two_circles.solve.json")
    ground = record["results"]["ground_state"]
    gershgorin = record["certificates"]["gershgorin"]
    assert ground["E_gr"] < -1.0
    assert gershgorin["ordering"] is True
    assert gershgorin["binding_enhanced"] is True
    assert gershgorin["E_star"] <= ground["E_gr"]
    assert gershgorin["analytic_E_star"] <= gershgorin["E_star"]
    assert record["certificates"]["positivity"]["passed"] is True
    assert len(record["certificates"]["quadrature"]["entries"]) == 3
    assert record["results"]["distances"][0][1] == pytest.approx(3.0)


def test_solve_in_physical_units(tmp_path):
    data = json.loads((SCENARIO_DIR / "single_circle.json").read_text(encoding="utf-8"))
    data["units"] = {"hbar": 1.0, "mass": 1.0}
    data["name"] = "heavy"
    assert _run("solve", _write_scenario(tmp_path, data), tmp_path) == 0
    ground = _read_json(tmp_path / "heavy.solve.json")["results"]["ground_state"]
    # hbar^2 nu^2 / 2m with m = 1
    assert ground["E_gr"] == pytest.approx(-0.5)


def test_planar_scheme_on_space_exits_with_schema_code(tmp_path):
    data = json.loads((SCENARIO_DIR / "single_circle.json").read_text(encoding="utf-8"))
    data["scheme"] = {"kind": "Finite2D"}
    assert _run("solve", _write_scenario(tmp_path, data), tmp_path) == 2


def test_missing_scenario_file(tmp_path):
    assert _run("solve", tmp_path / "nowhere.json", tmp_path) == 2


def test_intersecting_curves_exit_with_geometry_code(tmp_path):
    assert _run("solve", SCENARIO_DIR / "intersecting_pair.json", tmp_path) == 3
    assert _run("check", SCENARIO_DIR / "intersecting_pair.json", tmp_path) == 3
    record = _read_json(tmp_path / "intersecting_pair.check.json")
    assert record["results"]["passed"] is False


def test_scan_writes_csv_and_gnuplot(tmp_path):
    data = json.loads((SCENARIO_DIR / "two_circles.json").read_text(encoding="utf-8"))
    data["scan"] = {"E_min": -3.0, "E_max": -0.5, "points": 6}
    data["name"] = "pair_scan"
    assert _run("scan", _write_scenario(tmp_path, data), tmp_path, "--gnuplot") == 0

    rows = _read_csv(tmp_path / "pair_scan.scan.csv")
    assert rows[0] == ["E", "omega_0", "omega_1", "slope_0", "slope_1"]
    assert len(rows) == 7
    energies = [float(r[0]) for r in rows[1:]]
    assert energies[0] == -3.0 and energies[-1] == -0.5
    assert all(float(r[3]) < 0 for r in rows[1:])
    assert (tmp_path / "pair_scan.scan.gp").read_text(encoding="utf-8").startswith("set datafile")

    record = _read_json(tmp_path / "pair_scan.scan.json")
    assert any(c["track"] == 0 for c in record["results"]["crossings"])


def test_wavefunction_grid(tmp_path):
    data = json.loads((SCENARIO_DIR / "single_circle.json").read_text(encoding="utf-8"))
    data["wavefunction"] = {"points": 4, "l2_normalize": True}
    data["name"] = "wave"
    assert _run("wavefunction", _write_scenario(tmp_path, data), tmp_path) == 0
    rows = _read_csv(tmp_path / "wave.wavefunction.csv")
    assert rows[0] == ["x", "y", "z", "psi", "near_support"]
    assert len(rows) == 1 + 4 ** 3
    assert all(float(r[3]) > 0 for r in rows[1:])
    record = _read_json(tmp_path / "wave.wavefunction.json")
    assert record["results"]["all_positive"] is True
    assert record["results"]["l2_normalization_factor"] > 0


def test_rgflow_report(tmp_path):
    assert _run("rgflow", SCENARIO_DIR / "rg_circle.json", tmp_path) == 0
    record = _read_json(tmp_path / "rg_circle.rgflow.json")
    assert record["results"]["C"] == pytest.approx(2 * math.pi, rel=1e-10)
    assert record["results"]["beta"] == pytest.approx(-4.0 / (2 * math.pi), rel=1e-10)
    scaling = record["certificates"]["scaling_law"]
    assert scaling["max_discrepancy"] < 1e-8
    assert len(scaling["reports"]) == 15
    rows = _read_csv(tmp_path / "rg_circle.rgflow.csv")
    assert rows[0] == ["tau", "mu", "lambda_R", "lambda_R_ode", "beta"]
    for row in rows[1:]:
        assert float(row[3]) == pytest.approx(float(row[2]), rel=1e-8)


def test_rgflow_needs_rg_scheme(tmp_path):
    assert _run("rgflow", SCENARIO_DIR / "single_circle.json", tmp_path) == 2


@pytest.mark.slow
def test_check_suite_passes(tmp_path):
    assert _run("check", SCENARIO_DIR / "two_circles.json", tmp_path, "--seed", "1") == 0
    record = _read_json(tmp_path / "two_circles.check.json")
    assert record["results"]["passed"] is True
    assert {c["name"] for c in record["results"]["checks"]} >= {"ground state", "positivity", "gershgorin certificate"}


def _far_pair(tmp_path):
    data = json.loads((SCENARIO_DIR / "two_circles.json").read_text(encoding="utf-8"))
    data["name"] = "far_pair"
    data["curves"][1]["center"] = [0, 0, 5 * 2 * math.pi]
    data["curves"][1]["nu"] = 1.5
    return _write_scenario(tmp_path, data)


def test_solve_well_separated_pair(tmp_path):
    assert _run("solve", _far_pair(tmp_path), tmp_path) == 0
    record = _read_json(tmp_path / "far_pair.solve.json")
    ground = record["results"]["ground_state"]
    gershgorin = record["certificates"]["gershgorin"]
    assert ground["E_gr"] == pytest.approx(-2.25, rel=1e-9)
    assert gershgorin["ordering"] is True
    assert math.isfinite(gershgorin["analytic_E_star"])
    assert record["certificates"]["positivity"]["passed"] is True


@pytest.mark.slow
def test_check_suite_passes_for_well_separated_pair(tmp_path):
    assert _run("check", _far_pair(tmp_path), tmp_path, "--seed", "2") == 0
    checks = {c["name"]: c for c in _read_json(tmp_path / "far_pair.check.json")["results"]["checks"]}
    assert checks["ground state"]["passed"] is True
    assert checks["positivity"]["passed"] is True
    assert checks["gershgorin certificate"]["passed"] is True


def test_numerical_failure_exits_with_generic_code(tmp_path, monkeypatch):
    def fail(*args, **kwargs):
        raise ValueError("f(a) and f(b) must have different signs")

    monkeypatch.setattr("curvebound.cli.solve_ground_state", fail)
    assert _run("solve", SCENARIO_DIR / "two_circles.json", tmp_path) == 1
