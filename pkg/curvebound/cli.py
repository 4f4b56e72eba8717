# cli.py

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from rich.console import Console
from rich.table import Table

from . import __version__
from .checks import run_suite, suite_exit_code
from .config.settings import ConfigManager, CurveboundConfig
from .curves.system import CurveSystem
from .errors import NUMERICAL_FAILURES, CurveboundError, SchemaError, SchemeError
from .operator.principal import PrincipalMatrix
from .rgflow import flow_constant, flow_table, max_discrepancy, mu_invariance, rg_state, scaling_grid
from .scenario import RunRecord, Scenario, energy_grid, load_scenario
from .spectral import (
    bound_holds,
    eigen_flow,
    excited_crossings,
    gershgorin_lower_bound,
    grid_points,
    ground_state_wavefunction,
    l2_normalization,
    positivity_check,
    solve_ground_state,
)
from .types.common import UnitsConfig
from .types.schemes import BoundState3D, RGSubtracted
from .types.spectral import SpectralSolution
from .utils.logs import setup_logging
from .utils.output import write_csv, write_json, write_text
from .utils.progress import CheckTracker

logger = logging.getLogger(__name__)

DEFAULT_TAUS = (0.5, 1.0, 2.0, 4.0, 10.0)
DEFAULT_SCALING_ENERGIES = (-0.5, -1.0, -2.0)


def _solution_dict(sol: SpectralSolution, units: UnitsConfig) -> Dict[str, Any]:
    """Ground-state record in scenario units"""
    scale = units.energy_scale
    slope = sol.omega_slope / (scale * scale)
    data = sol.to_dict()
    data.update(
        E_gr=units.energy_from_canonical(sol.energy),
        bracket=[units.energy_from_canonical(e) for e in sol.bracket],
        omega_slope=slope,
        normalization=abs(slope) ** -0.5 if slope else None,
        residual=units.phi_from_canonical(sol.residual),
        gap=None if sol.gap is None else units.phi_from_canonical(sol.gap),
    )
    return data


class CurveboundApp:
    """Command dispatcher for one scenario per invocation"""

    def __init__(self, config: CurveboundConfig, out_dir: Optional[Path] = None, console: Optional[Console] = None):
        self.config = config
        self.out_dir = out_dir
        self.console = console or Console()

    def load(self, path: Path) -> Scenario:
        return load_scenario(path, self.config)

    def _out(self, scenario: Scenario, suffix: str) -> Path:
        directory = self.out_dir or Path(scenario.outputs.get("directory", scenario.config.output.directory))
        return directory / f"{scenario.name}.{suffix}"

    def _write_record(self, record: RunRecord, suffix: str) -> Path:
        path = write_json(self._out(record.scenario, suffix), record.to_dict(),
                          indent=record.scenario.config.output.json_indent)
        logger.info(f"wrote {path}")
        return path

    def _build(self, scenario: Scenario, record: RunRecord):
        started = time.perf_counter()
        system = scenario.build_system()
        matrix = PrincipalMatrix(system)
        record.timings["build"] = time.perf_counter() - started
        record.warnings += system.warnings + matrix.report.warnings
        for curve in system.curves:
            record.warnings += curve.warnings
        record.results["curves"] = [c.describe() for c in system.curves]
        if system.size > 1:
            record.results["distances"] = system.distances
        return system, matrix

    def _solve(self, matrix: PrincipalMatrix, record: RunRecord) -> SpectralSolution:
        started = time.perf_counter()
        solution = solve_ground_state(matrix)
        record.timings["solve"] = time.perf_counter() - started
        record.warnings += solution.warnings
        return solution

    # Commands

    def cmd_solve(self, scenario: Scenario, quadrature_report: bool = False) -> RunRecord:
        record = RunRecord("solve", scenario)
        system, matrix = self._build(scenario, record)
        solution = self._solve(matrix, record)
        units = scenario.units
        record.results["ground_state"] = _solution_dict(solution, units)
        positivity = positivity_check(solution, matrix)
        record.certificates["positivity"] = positivity.to_dict()
        record.warnings += positivity.warnings

        if isinstance(system.scheme, BoundState3D) and system.size > 1:
            started = time.perf_counter()
            bound = gershgorin_lower_bound(matrix, solution)
            record.timings["gershgorin"] = time.perf_counter() - started
            block = bound.to_dict()
            block["E_star"] = units.energy_from_canonical(bound.e_star)
            if bound.analytic_estimate is not None:
                block["analytic_E_star"] = units.energy_from_canonical(bound.analytic_estimate)
            block["ordering"] = bound_holds(bound.e_star, solution.energy)
            block["binding_enhanced"] = bool(solution.energy < system.scheme.threshold)
            record.certificates["gershgorin"] = block
            record.warnings += bound.warnings

        if quadrature_report:
            report = matrix.report.to_dict()
            report["entries"] = matrix.entry_diagnostics(solution.energy)
            record.certificates["quadrature"] = report

        self._write_record(record, "solve.json")
        self._display_solution(scenario, record)
        return record

    def cmd_scan(self, scenario: Scenario, gnuplot: bool = False) -> RunRecord:
        record = RunRecord("scan", scenario)
        system, matrix = self._build(scenario, record)
        default_hi = system.scheme.threshold if isinstance(system.scheme, BoundState3D) else -1.0
        grid = energy_grid(scenario.scan, scenario.units, scenario.units.energy_from_canonical(default_hi))

        started = time.perf_counter()
        flow = eigen_flow(matrix, grid)
        record.timings["scan"] = time.perf_counter() - started
        record.warnings += flow.warnings

        units = scenario.units
        n = matrix.size
        values = flow.tracked_eigenvalues
        slopes = flow.tracked_slopes
        scale = units.energy_scale
        header = ["E"] + [f"omega_{k}" for k in range(n)] + [f"slope_{k}" for k in range(n)]
        rows = [
            [units.energy_from_canonical(E)]
            + [units.phi_from_canonical(v) for v in values[m]]
            + [s / (scale * scale) for s in slopes[m]]
            for m, E in enumerate(flow.energies)
        ]
        csv_path = write_csv(self._out(scenario, "scan.csv"), header, rows)
        logger.info(f"wrote {csv_path}")
        if gnuplot:
            self._write_gnuplot(scenario, csv_path, n)

        record.results["crossings"] = [
            dict(c, E_lo=units.energy_from_canonical(c["E_lo"]), E_hi=units.energy_from_canonical(c["E_hi"]))
            for c in excited_crossings(flow)
        ]
        record.results["tracking_crossings"] = [list(c) for c in flow.crossings]
        record.results["csv"] = str(csv_path)
        self._write_record(record, "scan.json")
        self.console.print(f"[green]scan:[/green] {len(grid)} energies, {len(record.results['crossings'])} zero crossing(s)")
        return record

    def cmd_wavefunction(self, scenario: Scenario) -> RunRecord:
        record = RunRecord("wavefunction", scenario)
        system, matrix = self._build(scenario, record)
        solution = self._solve(matrix, record)
        axes = self._grid_axes(scenario, system)

        started = time.perf_counter()
        wf = ground_state_wavefunction(solution, system, grid_points(axes))
        record.timings["wavefunction"] = time.perf_counter() - started
        record.warnings += wf.warnings

        if scenario.wavefunction.get("l2_normalize", False):
            wf.l2_factor = l2_normalization(wf.values, axes, system.manifold)
            record.results["l2_normalization_factor"] = wf.l2_factor

        coords = wf.points.reshape(-1, system.manifold.dimension)
        names = ["x", "y", "z"][: system.manifold.dimension]
        header = names + ["psi", "near_support"]
        rows = [list(p) + [v, bool(flag)] for p, v, flag in
                zip(coords, wf.values.ravel(), wf.near_support.ravel())]
        csv_path = write_csv(self._out(scenario, "wavefunction.csv"), header, rows)
        logger.info(f"wrote {csv_path}")

        finite = wf.values[np.isfinite(wf.values)]
        record.results["ground_state"] = _solution_dict(solution, scenario.units)
        record.results["grid_points"] = int(wf.values.size)
        record.results["near_support_points"] = int(wf.near_support.sum())
        record.results["all_positive"] = bool(np.all(finite > 0))
        record.results["csv"] = str(csv_path)
        self._write_record(record, "wavefunction.json")
        self.console.print(f"[green]wavefunction:[/green] {wf.values.size} points, all positive: "
                           f"{record.results['all_positive']}")
        return record

    def cmd_rgflow(self, scenario: Scenario) -> RunRecord:
        record = RunRecord("rgflow", scenario)
        system, _ = self._build(scenario, record)
        scheme = system.scheme
        if not isinstance(scheme, RGSubtracted):
            raise SchemeError(f"rgflow needs the RGSubtracted scheme, got {scheme.kind.value}")
        units = scenario.units
        curve = system.curves[0]
        taus = [float(t) for t in scenario.rgflow.get("taus", DEFAULT_TAUS)]
        energies = [units.energy_to_canonical(float(E))
                    for E in scenario.rgflow.get("energies", DEFAULT_SCALING_ENERGIES)]

        constant = flow_constant(curve.length, scheme.mu)
        # lambda_R = inf has no finite flow; the table then follows the unit coupling
        lam = scheme.lambda_R if scheme.inverse_coupling != 0 else 1.0
        state = rg_state(curve, lam, scheme.mu)

        started = time.perf_counter()
        table = flow_table(state, taus)
        rows = [[r["tau"], r["mu"], units.coupling_from_canonical(r["lambda_R"]),
                 units.coupling_from_canonical(r["lambda_R_ode"]), units.coupling_from_canonical(r["beta"])]
                for r in table]
        csv_path = write_csv(self._out(scenario, "rgflow.csv"), ["tau", "mu", "lambda_R", "lambda_R_ode", "beta"], rows)
        reports = scaling_grid(curve, scheme.lambda_R, scheme.mu, taus, energies)
        drift = mu_invariance(curve, scheme.lambda_R, scheme.mu, energies[0])
        record.timings["rgflow"] = time.perf_counter() - started

        record.results.update(
            C=constant.value,
            C_error=constant.error,
            length=curve.length,
            beta=units.coupling_from_canonical(-state.lambda_R ** 2 * state.constant / (2 * np.pi * state.length)),
            csv=str(csv_path),
        )
        record.certificates["scaling_law"] = {
            "reports": [dict(r.to_dict(), E=units.energy_from_canonical(r.energy)) for r in reports],
            "max_discrepancy": units.phi_from_canonical(max_discrepancy(reports)),
            "mu_invariance": drift,
        }
        self._write_record(record, "rgflow.json")
        self.console.print(f"[green]rgflow:[/green] C = {constant.value:.12g}, "
                           f"max scaling residual {max_discrepancy(reports):.2e}")
        return record

    def cmd_check(self, scenario: Scenario, seed: int = 0) -> int:
        tracker = CheckTracker(1, console=self.console)
        with tracker:
            results, build_error = run_suite(scenario, seed=seed, tracker=tracker)
        tracker.display_summary()
        record = RunRecord("check", scenario)
        record.results["checks"] = [
            {"name": r.name, "passed": r.passed, "detail": r.detail, "error": r.error} for r in results
        ]
        record.timings = {r.name: r.elapsed for r in results}
        record.results["passed"] = all(r.passed for r in results)
        self._write_record(record, "check.json")
        return suite_exit_code(results, build_error)

    # Helpers

    def _grid_axes(self, scenario: Scenario, system: CurveSystem) -> List[np.ndarray]:
        block = scenario.wavefunction
        dim = system.manifold.dimension
        if "axes" in block:
            axes = block["axes"]
            if not isinstance(axes, list) or len(axes) != dim:
                raise SchemaError(f"expected {dim} axes", field="wavefunction.axes")
            return [np.linspace(float(a["min"]), float(a["max"]), int(a["points"])) for a in axes]
        points = int(block.get("points", 17))
        pts = np.concatenate([c.points for c in system.curves])
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        pad = float(block.get("padding", 0.5 * float(np.max(hi - lo)) + 0.5))
        lower = block.get("lower", lo - pad)
        upper = block.get("upper", hi + pad)
        if len(lower) != dim or len(upper) != dim:
            raise SchemaError(f"expected {dim} coordinates", field="wavefunction.lower")
        return [np.linspace(float(a), float(b), points) for a, b in zip(lower, upper)]

    def _write_gnuplot(self, scenario: Scenario, csv_path: Path, n: int) -> None:
        lines = [
            "set datafile separator ','",
            "set key autotitle columnhead",
            "set xlabel 'E'",
            "set ylabel 'omega'",
            "set yzeroaxis",
            "plot " + ", ".join(f"'{csv_path.name}' using 1:{k + 2} with lines" for k in range(n)),
        ]
        path = write_text(self._out(scenario, "scan.gp"), "\n".join(lines) + "\n")
        logger.info(f"wrote {path}")

    def _display_solution(self, scenario: Scenario, record: RunRecord) -> None:
        table = Table(title=f"Ground state: {scenario.name}")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", style="green")
        gs = record.results["ground_state"]
        table.add_row("E_gr", f"{gs['E_gr']:.15g}")
        table.add_row("A0", ", ".join(f"{a:.10g}" for a in gs["A0"]))
        table.add_row("omega slope", f"{gs['omega_slope']:.10g}")
        table.add_row("evaluations", str(gs["evaluations"]))
        if "gershgorin" in record.certificates:
            g = record.certificates["gershgorin"]
            table.add_row("E_star", f"{g['E_star']:.15g}")
            table.add_row("E_star <= E_gr", str(g["ordering"]))
        table.add_row("positivity", str(record.certificates["positivity"]["passed"]))
        self.console.print(table)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvebound", description="Bound states of delta interactions on closed curves")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, type=Path, help="Scenario JSON file")
    common.add_argument("--out", type=Path, help="Output directory")
    common.add_argument("--threads", type=int, help="Worker threads for assembly and evaluation")
    common.add_argument("--config", type=Path, help="Settings TOML file")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    sub = parser.add_subparsers(dest="command", required=True)
    solve = sub.add_parser("solve", parents=[common], help="Ground-state energy and certificates")
    solve.add_argument("--quadrature-report", action="store_true", help="Include per-entry quadrature diagnostics")
    scan = sub.add_parser("scan", parents=[common], help="Eigenvalue flow of Phi(E) over an energy grid")
    scan.add_argument("--gnuplot", action="store_true", help="Also write a gnuplot script for the scan")
    sub.add_parser("wavefunction", parents=[common], help="Ground-state wavefunction on a grid")
    sub.add_parser("rgflow", parents=[common], help="Coupling flow and scaling-law report")
    check = sub.add_parser("check", parents=[common], help="Run the invariant suite")
    check.add_argument("--seed", type=int, default=0, help="Seed for randomized checks")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    console = Console()
    try:
        config = ConfigManager(args.config).config
        setup_logging(config.logging.level, args.verbose)
        if args.threads is not None:
            config = config.with_overrides({"solver": {"threads": args.threads}})
        app = CurveboundApp(config, out_dir=args.out, console=console)
        scenario = app.load(args.scenario)

        if args.command == "solve":
            app.cmd_solve(scenario, quadrature_report=args.quadrature_report)
        elif args.command == "scan":
            app.cmd_scan(scenario, gnuplot=args.gnuplot)
        elif args.command == "wavefunction":
            app.cmd_wavefunction(scenario)
        elif args.command == "rgflow":
            app.cmd_rgflow(scenario)
        else:
            return app.cmd_check(scenario, seed=args.seed)
    except CurveboundError as e:
        console.print(f"[red]{type(e).__name__}:[/red] {e}")
        return e.exit_code
    except NUMERICAL_FAILURES as e:
        logger.debug("numerical failure", exc_info=True)
        console.print(f"[red]numerical failure ({type(e).__name__}):[/red] {e}")
        return CurveboundError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
