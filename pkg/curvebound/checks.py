# checks.py

import logging
import time
from typing import Callable, List, Optional, Tuple

import numpy as np

from .curves.curve import ARCLENGTH_TOL, MIN_NODES, Curve
from .curves.system import CurveSystem
from .errors import NUMERICAL_FAILURES, CurveboundError, InvariantViolationError
from .operator.principal import PrincipalMatrix, offdiag_envelope
from .rgflow import flow_coupling, flow_coupling_ode, max_discrepancy, mu_invariance, rg_state, scaling_grid
from .scenario import Scenario
from .spectral import (
    bound_holds,
    eigen_flow,
    gershgorin_disks,
    gershgorin_lower_bound,
    ground_state_wavefunction,
    grid_points,
    positivity_check,
    predicted_binding_shift,
    solve_ground_state,
)
from .types.common import CheckResult, ManifoldKind, SchemeKind
from .types.schemes import BoundState3D
from .types.spectral import SpectralSolution
from .utils.progress import CheckTracker

logger = logging.getLogger(__name__)

Check = Tuple[str, Callable[[], str]]

SCALING_TAUS = (0.5, 1.0, 2.0, 4.0)
SCALING_ENERGIES = (-0.5, -1.0, -2.0)
# Binding shifts below this many root tolerances are not resolved by the solver
RESOLVABLE_SHIFT = 10.0


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvariantViolationError(message)


class InvariantSuite:
    """Structural invariants of every module, run against one scenario"""

    def __init__(self, scenario: Scenario, seed: int = 0):
        self.scenario = scenario
        self.rng = np.random.default_rng(seed)
        self.system: Optional[CurveSystem] = None
        self.matrix: Optional[PrincipalMatrix] = None
        self.solution: Optional[SpectralSolution] = None
        self.build_error: Optional[CurveboundError] = None

    # Check registry

    def checks(self) -> List[Check]:
        system = self.system
        kind = system.scheme.kind
        flat3 = system.manifold.kind is ManifoldKind.EUCLIDEAN_SPACE3
        checks: List[Check] = [
            ("heat kernel symmetry", self.check_heat_kernel),
            ("curve geometry", self.check_curves),
            ("principal matrix derivative", self.check_derivative),
            ("mesh refinement", self.check_mesh_refinement),
        ]
        if flat3 and system.size > 1:
            checks.append(("off-diagonal envelope", self.check_envelope))
        if kind in (SchemeKind.BOUND_STATE_3D, SchemeKind.FINITE_2D):
            checks += [
                ("ground state", self.check_ground_state),
                ("slope consistency", self.check_slope),
                ("positivity", self.check_positivity),
                ("wavefunction positivity", self.check_wavefunction),
            ]
            if kind is SchemeKind.BOUND_STATE_3D and system.size > 1:
                checks.append(("gershgorin certificate", self.check_gershgorin))
        checks.append(("eigenvalue flow", self.check_flow))
        if kind is SchemeKind.RG_SUBTRACTED:
            checks += [
                ("coupling flow", self.check_coupling_flow),
                ("scaling law", self.check_scaling_law),
            ]
        return checks

    def run(self, tracker: Optional[CheckTracker] = None) -> List[CheckResult]:
        started = time.time()
        try:
            self.system = self.scenario.build_system()
            self.matrix = PrincipalMatrix(self.system)
        except CurveboundError as e:
            logger.error(f"building {self.scenario.name} failed: {e}")
            self.build_error = e
            result = CheckResult("build", False, error=f"{type(e).__name__}: {e}", elapsed=time.time() - started)
            if tracker:
                tracker.complete_check(result)
            return [result]

        checks = self.checks()
        results = [CheckResult("build", True, detail=f"{self.system.size} curve(s)", elapsed=time.time() - started)]
        if tracker:
            tracker.set_total(len(checks) + 1)
            tracker.complete_check(results[0])
        for name, check in checks:
            if tracker:
                tracker.start_check(name)
            started = time.time()
            try:
                result = CheckResult(name, True, detail=check())
            except CurveboundError as e:
                logger.error(f"check '{name}' failed: {e}")
                result = CheckResult(name, False, error=f"{type(e).__name__}: {e}")
            except NUMERICAL_FAILURES as e:
                logger.error(f"check '{name}' hit a numerical failure: {e}")
                result = CheckResult(name, False, error=f"{type(e).__name__}: {e}")
            result.elapsed = time.time() - started
            results.append(result)
            if tracker:
                tracker.complete_check(result)
        return results

    # Helpers

    def _reference_energy(self) -> float:
        scheme = self.system.scheme
        if isinstance(scheme, BoundState3D):
            return 2.0 * scheme.threshold
        return -1.0

    def _ground_state(self) -> SpectralSolution:
        if self.solution is None:
            self.solution = solve_ground_state(self.matrix)
        return self.solution

    def _sample_points(self, count: int) -> np.ndarray:
        pts = np.concatenate([c.points for c in self.system.curves])
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        pad = 0.5 * max(float(np.max(hi - lo)), 1.0)
        samples = self.rng.uniform(lo - pad, hi + pad, size=(count, pts.shape[1]))
        if self.system.manifold.kind is ManifoldKind.HYPERBOLIC_SPACE3:
            samples[:, 2] = self.rng.uniform(0.5 * lo[2], hi[2] + pad, size=count)
        return samples

    # Checks

    def check_heat_kernel(self) -> str:
        m = self.system.manifold
        x, y = self._sample_points(16), self._sample_points(16)
        for t in (0.1, 1.0):
            forward = m.heat_kernel(t, x, y)
            backward = m.heat_kernel(t, y, x)
            _require(bool(np.all(forward > 0)), f"heat kernel is not positive at t={t}")
            _require(bool(np.allclose(forward, backward, rtol=1e-12, atol=0)), f"heat kernel is not symmetric at t={t}")
        return "K_t(x, y) = K_t(y, x) > 0 on 16 random pairs"

    def check_curves(self) -> str:
        worst = 0.0
        for idx, curve in enumerate(self.system.curves):
            _require(curve.arclength_error <= ARCLENGTH_TOL,
                     f"curve {idx}: arclength parametrization error {curve.arclength_error:.2e}")
            error = curve.frenet.orthonormality_error()
            _require(error < 1e-8, f"curve {idx}: Frenet frame orthonormality error {error:.2e}")
            gap = curve.self_gap
            _require(gap.Delta > 0, f"curve {idx}: non-positive self-gap")
            worst = max(worst, curve.arclength_error)
        return f"arclength error <= {worst:.1e}"

    def check_derivative(self) -> str:
        E = self._reference_energy()
        phi = self.matrix.evaluate(E)
        dphi = self.matrix.derivative(E)
        _require(bool(np.array_equal(phi, phi.T)), "Phi(E) is not symmetric")
        _require(bool(np.all(np.diag(dphi) < 0)), "dPhi/dE has a non-negative diagonal entry")
        _require(bool(np.all(dphi <= 0)), "dPhi/dE has a positive entry")
        h = 1e-4 * abs(E)
        fd = (self.matrix.evaluate(E + h) - self.matrix.evaluate(E - h)) / (2.0 * h)
        rel = float(np.max(np.abs(fd - dphi)) / np.max(np.abs(dphi)))
        _require(rel < 1e-6, f"dPhi/dE differs from central differences by {rel:.2e}")
        return f"central-difference mismatch {rel:.1e} at E={E:g}"

    def check_mesh_refinement(self) -> str:
        E = self._reference_energy()
        system = self.system
        phi_fine = self.matrix.evaluate(E)[0, 0]
        curves = [Curve(c.parametrization, c.manifold, max(c.nodes // 2, MIN_NODES), spec=c.spec, config=c.config)
                  for c in system.curves]
        half = CurveSystem(system.manifold, curves, system.scheme, system.config)
        phi_half = PrincipalMatrix(half, threads=1).evaluate(E)[0, 0]
        tol = 1e-8 if self.system.scheme.kind is SchemeKind.FINITE_2D else 1e-6
        change = abs(phi_fine - phi_half) / max(1.0, abs(phi_fine))
        _require(change < tol, f"Phi_11 changes by {change:.2e} under mesh halving of {system.curves[0].nodes} nodes")
        return f"Phi_11 change {change:.1e} under mesh halving"

    def check_envelope(self) -> str:
        E = self._reference_energy()
        phi = self.matrix.evaluate(E)
        for i in range(self.system.size):
            for j in range(i + 1, self.system.size):
                bound = offdiag_envelope(self.system, i, j, E)
                _require(abs(phi[i, j]) <= bound * (1.0 + 1e-9),
                         f"|Phi_{i}{j}| = {abs(phi[i, j]):.6g} exceeds its envelope {bound:.6g}")
        return "every |Phi_ij| below its flat-space envelope"

    def check_ground_state(self) -> str:
        sol = self._ground_state()
        lo, hi = sol.bracket
        _require(lo <= sol.energy <= hi, "E_gr lies outside its bracket")
        scheme = self.system.scheme
        if isinstance(scheme, BoundState3D):
            threshold = scheme.threshold
            if self.system.size == 1:
                _require(abs(sol.energy - threshold) <= 1e-10 * abs(threshold),
                         f"single-curve E_gr = {sol.energy:.15g} differs from -nu^2 = {threshold:.15g}")
            else:
                _require(sol.energy <= threshold, f"E_gr = {sol.energy:.12g} lies above -max nu^2 = {threshold:g}")
                shift = predicted_binding_shift(self.matrix)
                resolution = RESOLVABLE_SHIFT * self.system.config.solver.root_rel_tol * abs(threshold)
                if shift > resolution:
                    _require(sol.energy < threshold, f"E_gr = {sol.energy:.12g} is not below -max nu^2 = {threshold:g}")
                else:
                    return f"E_gr = {sol.energy:.12g}; binding shift {shift:.1e} is below solver resolution"
        return f"E_gr = {sol.energy:.12g} after {sol.evaluations} evaluations"

    def check_slope(self) -> str:
        sol = self._ground_state()
        h = 1e-5 * abs(sol.energy)
        fd = (self.matrix.lowest_eigenvalue(sol.energy + h) - self.matrix.lowest_eigenvalue(sol.energy - h)) / (2 * h)
        rel = abs(fd - sol.omega_slope) / abs(sol.omega_slope)
        _require(sol.omega_slope < 0, f"omega_0'(E_gr) = {sol.omega_slope:.6g} is not negative")
        _require(rel < 1e-5, f"omega_0'(E_gr) differs from central differences by {rel:.2e}")
        return f"omega_0' = {sol.omega_slope:.6g}, mismatch {rel:.1e}"

    def check_positivity(self) -> str:
        report = positivity_check(self._ground_state(), self.matrix)
        if not report.offdiag_negative:
            return "decoupled system; positivity not enforced"
        _require(report.passed, f"A0 has a negative component {report.min_component:.3e}")
        if report.unresolved_components:
            return f"A0 >= 0; {report.unresolved_components} component(s) below float resolution"
        return f"min A0 component {report.min_component:.6g}"

    def check_wavefunction(self) -> str:
        sol = self._ground_state()
        pts = np.concatenate([c.points for c in self.system.curves])
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        pad = 0.5 * float(np.max(hi - lo)) + 0.1
        axes = [np.linspace(a - pad, b + pad, 5) for a, b in zip(lo, hi)]
        if self.system.manifold.kind is ManifoldKind.HYPERBOLIC_SPACE3:
            axes[2] = np.linspace(0.5 * lo[2], hi[2] + pad, 5)
        wf = ground_state_wavefunction(sol, self.system, grid_points(axes))
        values = wf.values[np.isfinite(wf.values) & ~wf.near_support]
        _require(bool(np.all(values > 0)), "ground-state wavefunction is not positive on the grid")
        return f"psi > 0 at {values.size} grid points"

    def check_gershgorin(self) -> str:
        sol = self._ground_state()
        bound = gershgorin_lower_bound(self.matrix, sol)
        _require(bound_holds(bound.e_star, sol.energy), f"E_star = {bound.e_star:.12g} above E_gr = {sol.energy:.12g}")
        for E in bound.e_star * (1.0 + 3.0 * self.rng.uniform(0.01, 1.0, size=20)):
            phi = self.matrix.evaluate(float(E))
            centers, radii = gershgorin_disks(phi)
            _require(bool(np.all(centers - radii > 0)), f"a Gershgorin disk contains 0 at E={E:.6g}")
            eigs = np.linalg.eigvalsh(phi)
            inside = [np.any(np.abs(w - centers) <= radii * (1 + 1e-12) + 1e-12) for w in eigs]
            _require(all(inside), f"an eigenvalue escapes the Gershgorin disks at E={E:.6g}")
        return f"E_star = {bound.e_star:.12g} <= E_gr"

    def check_flow(self) -> str:
        E0 = self._reference_energy()
        grid = np.linspace(4.0 * E0, 0.25 * E0, 20)
        flow = eigen_flow(self.matrix, grid)
        _require(bool(np.all(flow.slopes < 0)), "an eigenvalue slope is not negative on the grid")
        tracked = flow.tracked_eigenvalues
        _require(bool(np.all(np.diff(tracked, axis=0) < 0)), "a tracked eigenvalue is not decreasing in E")
        return f"{flow.eigenvalues.shape[1]} decreasing eigenvalue(s) on 20 points, {len(flow.crossings)} crossing(s)"

    def check_coupling_flow(self) -> str:
        scheme = self.system.scheme
        curve = self.system.curves[0]
        lam = 1.0 if scheme.inverse_coupling == 0 else scheme.lambda_R
        state = rg_state(curve, lam, scheme.mu)
        if lam > 0:
            taus = (1.0, 2.0, 10.0)
        else:
            taus = (1.0, 0.5, 0.1)
        for tau in taus:
            closed = flow_coupling(state, tau)
            ode = flow_coupling_ode(state, tau)
            _require(abs(closed - ode) <= 1e-8 * abs(closed), f"flow ODE mismatch at tau={tau}")
        once = flow_coupling(rg_state(curve, flow_coupling(state, taus[1]), scheme.mu * taus[1]), taus[2])
        twice = flow_coupling(state, taus[1] * taus[2])
        _require(abs(once - twice) <= 1e-10 * abs(twice), "coupling flow is not a semigroup")
        return f"C = {state.constant:.12g}"

    def check_scaling_law(self) -> str:
        scheme = self.system.scheme
        curve = self.system.curves[0]
        reports = scaling_grid(curve, scheme.lambda_R, scheme.mu, SCALING_TAUS, SCALING_ENERGIES)
        worst = max_discrepancy(reports)
        _require(worst < 1e-6, f"scaling law residual {worst:.2e}")
        drift = abs(mu_invariance(curve, scheme.lambda_R, scheme.mu, -1.0))
        _require(drift < 1e-6, f"Phi_R drifts with mu along the flow: {drift:.2e}")
        return f"max residual {worst:.1e}, mu drift {drift:.1e}"


def run_suite(scenario: Scenario, seed: int = 0, tracker: Optional[CheckTracker] = None) -> Tuple[List[CheckResult], Optional[CurveboundError]]:
    suite = InvariantSuite(scenario, seed=seed)
    results = suite.run(tracker)
    return results, suite.build_error


def suite_exit_code(results: List[CheckResult], build_error: Optional[CurveboundError]) -> int:
    if build_error is not None:
        return build_error.exit_code
    return 0 if all(r.passed for r in results) else InvariantViolationError.exit_code
