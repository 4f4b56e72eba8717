# scenario.py

import hashlib
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from . import __version__
from .config.settings import CurveboundConfig
from .curves.curve import Curve, build_curve
from .curves.io import read_point_table
from .curves.specs import CurveSpec, curve_spec_from_dict
from .curves.system import CurveSystem
from .errors import SchemaError
from .geometry import create_manifold
from .geometry.base import Manifold
from .operator.principal import coupling_for_binding
from .types.common import ManifoldKind, SchemeKind, UnitsConfig
from .types.schemes import BoundState3D, Finite2D, Regularized, RGSubtracted, Scheme
from .utils.output import canonical_json, to_jsonable

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {"name", "units", "manifold", "scheme", "curves", "solver", "scan", "wavefunction", "rgflow",
                  "outputs"}
# Solver keys given in energy units and mapped to canonical units
_ENERGY_KEYS = {"e_min", "e_max_2d"}
_SOLVER_SECTIONS = ("quadrature", "geometry", "solver")


@dataclass
class Scenario:
    """A validated scenario document"""
    raw: Dict[str, Any]
    units: UnitsConfig
    manifold: Dict[str, Any]
    scheme: Dict[str, Any]
    curves: List[CurveSpec]
    curve_data: List[Dict[str, Any]]
    config: CurveboundConfig
    name: str = "scenario"
    scan: Dict[str, Any] = field(default_factory=dict)
    wavefunction: Dict[str, Any] = field(default_factory=dict)
    rgflow: Dict[str, Any] = field(default_factory=dict)
    outputs: Dict[str, Any] = field(default_factory=dict)
    source: Optional[Path] = None

    @property
    def sha256(self) -> str:
        return hashlib.sha256(canonical_json(self.raw).encode("utf-8")).hexdigest()

    @property
    def scheme_kind(self) -> SchemeKind:
        return SchemeKind(self.scheme["kind"])

    def build_manifold(self) -> Manifold:
        return create_manifold(self.manifold, self.config.geometry, self.config.quadrature)

    def build_system(self, manifold: Optional[Manifold] = None) -> CurveSystem:
        manifold = manifold or self.build_manifold()
        nodes = self.config.quadrature.nodes
        curves = [build_curve(spec, manifold, data.get("nodes", nodes), self.config.quadrature)
                  for spec, data in zip(self.curves, self.curve_data)]
        return CurveSystem(manifold, curves, self.build_scheme(curves), self.config)

    def build_scheme(self, curves: Sequence[Curve]) -> Scheme:
        kind = self.scheme_kind
        units = self.units
        if kind is SchemeKind.BOUND_STATE_3D:
            return BoundState3D(nu=tuple(float(d["nu"]) for d in self.curve_data))
        if kind is SchemeKind.FINITE_2D:
            couplings = []
            for curve, data in zip(curves, self.curve_data):
                if "coupling" in data:
                    couplings.append(units.coupling_to_canonical(float(data["coupling"])))
                else:
                    couplings.append(coupling_for_binding(curve, float(data["nu"])))
            return Finite2D(couplings=tuple(couplings))
        if kind is SchemeKind.RG_SUBTRACTED:
            return RGSubtracted(
                inverse_coupling=units.inverse_coupling_to_canonical(self.inverse_lambda_R),
                mu=float(self.scheme["mu"]),
            )
        eps = float(self.scheme["eps"])
        if "inverse_couplings" in self.scheme:
            return Regularized(
                eps=eps,
                inverse_couplings=tuple(units.inverse_coupling_to_canonical(float(v))
                                        for v in self.scheme["inverse_couplings"]),
            )
        return Regularized.from_prescription(
            curves, eps, units.inverse_coupling_to_canonical(self.inverse_lambda_R), float(self.scheme["mu"])
        )

    @property
    def inverse_lambda_R(self) -> float:
        """1/lambda_R in scenario units; 'inf' (or an explicit 0 inverse) is the decoupled limit"""
        if "inverse_lambda_R" in self.scheme:
            return float(self.scheme["inverse_lambda_R"])
        value = float(self.scheme["lambda_R"])
        return 0.0 if math.isinf(value) else 1.0 / value


def _line_of(text: str, key: str) -> Optional[int]:
    match = re.search(rf'"{re.escape(key)}"\s*:', text)
    return text.count("\n", 0, match.start()) + 1 if match else None


def _require_dict(value: Any, name: str) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise SchemaError("expected an object", field=name)
    return value


def _positive_number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0 or not math.isfinite(value):
        raise SchemaError(f"must be a positive number, got {value!r}", field=name)
    return float(value)


def _solver_overrides(block: Dict[str, Any], units: UnitsConfig) -> Dict[str, Dict[str, Any]]:
    """Map the flat scenario solver block onto settings sections"""
    base = CurveboundConfig()
    overrides: Dict[str, Dict[str, Any]] = {}
    for key, value in block.items():
        for section in _SOLVER_SECTIONS:
            if hasattr(getattr(base, section), key):
                if key in _ENERGY_KEYS:
                    if isinstance(value, bool) or not isinstance(value, (int, float)):
                        raise SchemaError("expected a number", field=f"solver.{key}")
                    value = units.energy_to_canonical(float(value))
                overrides.setdefault(section, {})[key] = value
                break
        else:
            raise SchemaError("unknown solver setting", field=f"solver.{key}")
    return overrides


def _check_lambda(scheme: Dict[str, Any]) -> None:
    if "inverse_lambda_R" in scheme:
        value = scheme["inverse_lambda_R"]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise SchemaError(f"must be a finite number, got {value!r}", field="scheme.inverse_lambda_R")
        return
    value = scheme["lambda_R"]
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise SchemaError(f"must be a number or 'inf', got {value!r}", field="scheme.lambda_R")
    if isinstance(value, bool) or number == 0 or math.isnan(number):
        raise SchemaError(f"must be non-zero, got {value!r}", field="scheme.lambda_R")


def _check_scheme(scheme: Dict[str, Any], manifold_kind: ManifoldKind, curve_data: List[Dict[str, Any]]) -> None:
    try:
        kind = SchemeKind(scheme.get("kind"))
    except ValueError:
        allowed = ", ".join(k.value for k in SchemeKind)
        raise SchemaError(f"unknown scheme {scheme.get('kind')!r} (expected one of {allowed})", field="scheme.kind")

    dimension = 2 if manifold_kind is ManifoldKind.EUCLIDEAN_PLANE else 3
    if kind is SchemeKind.BOUND_STATE_3D:
        if dimension != 3:
            raise SchemaError(f"BoundState3D needs a 3-dimensional manifold, got {manifold_kind.value}",
                              field="scheme.kind")
        for i, data in enumerate(curve_data):
            _positive_number(data.get("nu"), f"curves[{i}].nu")
    elif kind is SchemeKind.FINITE_2D:
        if manifold_kind is not ManifoldKind.EUCLIDEAN_PLANE:
            raise SchemaError(f"Finite2D needs EuclideanPlane, got {manifold_kind.value}", field="scheme.kind")
        for i, data in enumerate(curve_data):
            if "coupling" in data:
                _positive_number(data["coupling"], f"curves[{i}].coupling")
            else:
                _positive_number(data.get("nu"), f"curves[{i}].nu")
    elif kind is SchemeKind.RG_SUBTRACTED:
        if manifold_kind is not ManifoldKind.EUCLIDEAN_SPACE3:
            raise SchemaError(f"RGSubtracted needs EuclideanSpace3, got {manifold_kind.value}", field="scheme.kind")
        if len(curve_data) != 1:
            raise SchemaError(f"RGSubtracted works with a single curve, got {len(curve_data)}", field="curves")
        _positive_number(scheme.get("mu"), "scheme.mu")
        if "lambda_R" not in scheme and "inverse_lambda_R" not in scheme:
            raise SchemaError("needs lambda_R or inverse_lambda_R", field="scheme")
        _check_lambda(scheme)
    else:
        _positive_number(scheme.get("eps"), "scheme.eps")
        if "inverse_couplings" in scheme:
            values = scheme["inverse_couplings"]
            if not isinstance(values, list) or len(values) != len(curve_data):
                raise SchemaError(f"expected {len(curve_data)} values", field="scheme.inverse_couplings")
        else:
            _positive_number(scheme.get("mu"), "scheme.mu")
            if "lambda_R" not in scheme and "inverse_lambda_R" not in scheme:
                raise SchemaError("needs inverse_couplings, or lambda_R with mu", field="scheme")
            _check_lambda(scheme)


def parse_scenario(data: Dict[str, Any], base_config: Optional[CurveboundConfig] = None,
                   source: Optional[Path] = None) -> Scenario:
    """Validate a scenario document and map it onto canonical units"""
    data = _require_dict(data, "scenario")
    unknown = sorted(set(data) - TOP_LEVEL_KEYS)
    if unknown:
        raise SchemaError(f"unknown keys {unknown}", field="scenario")

    units_block = _require_dict(data.get("units", {}), "units")
    units = UnitsConfig(
        hbar=_positive_number(units_block.get("hbar", 1.0), "units.hbar"),
        mass=_positive_number(units_block.get("mass", 0.5), "units.mass"),
    )

    manifold = _require_dict(data.get("manifold"), "manifold")
    try:
        manifold_kind = ManifoldKind(manifold.get("kind"))
    except ValueError:
        allowed = ", ".join(k.value for k in ManifoldKind)
        raise SchemaError(f"unknown manifold kind {manifold.get('kind')!r} (expected one of {allowed})",
                          field="manifold.kind")
    if manifold_kind is ManifoldKind.FLAT_TORUS3:
        periods = manifold.get("periods")
        if not isinstance(periods, list) or len(periods) != 3:
            raise SchemaError("expected three periods", field="manifold.periods")
        for i, p in enumerate(periods):
            _positive_number(p, f"manifold.periods[{i}]")
    curvature_scale = 1.0
    if manifold_kind is ManifoldKind.HYPERBOLIC_SPACE3:
        curvature_scale = _positive_number(manifold.get("curvature_scale", 1.0), "manifold.curvature_scale")

    entries = data.get("curves")
    if not isinstance(entries, list) or not entries:
        raise SchemaError("expected a non-empty list of curves", field="curves")
    specs: List[CurveSpec] = []
    curve_data: List[Dict[str, Any]] = []
    for i, entry in enumerate(entries):
        entry = dict(_require_dict(entry, f"curves[{i}]"))
        if "file" in entry:
            path = Path(entry.pop("file"))
            if source is not None and not path.is_absolute():
                path = source.parent / path
            entry["points"] = read_point_table(path).tolist()
        spec = curve_spec_from_dict(entry, prefix=f"curves[{i}]", curvature_scale=curvature_scale)
        spec.check_manifold(manifold_kind)
        specs.append(spec)
        curve_data.append({k: entry[k] for k in ("nu", "coupling", "nodes") if k in entry})

    scheme = _require_dict(data.get("scheme"), "scheme")
    _check_scheme(scheme, manifold_kind, curve_data)

    config = base_config or CurveboundConfig()
    solver_block = _require_dict(data.get("solver", {}), "solver")
    config = config.with_overrides(_solver_overrides(solver_block, units))

    scenario = Scenario(
        raw=data,
        units=units,
        manifold=manifold,
        scheme=scheme,
        curves=specs,
        curve_data=curve_data,
        config=config,
        name=str(data.get("name", source.stem if source else "scenario")),
        scan=_require_dict(data.get("scan", {}), "scan"),
        wavefunction=_require_dict(data.get("wavefunction", {}), "wavefunction"),
        rgflow=_require_dict(data.get("rgflow", {}), "rgflow"),
        outputs=_require_dict(data.get("outputs", {}), "outputs"),
        source=source,
    )
    logger.debug(f"scenario {scenario.name} ({scenario.sha256[:12]}): {len(specs)} curve(s) on {manifold_kind.value}")
    return scenario


def load_scenario(path: Union[str, Path], base_config: Optional[CurveboundConfig] = None) -> Scenario:
    """Read a JSON scenario file; schema errors carry the offending line where it can be found"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SchemaError(f"cannot read scenario {path}: {e}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(e.msg, field=str(path), line=e.lineno)
    try:
        return parse_scenario(data, base_config, source=path)
    except SchemaError as e:
        if e.line is None and e.field:
            key = re.split(r"[.\[]", e.field)[-1].rstrip("]")
            line = _line_of(text, key)
            if line is not None:
                raise SchemaError(str(e), line=line) from e
        raise


def energy_grid(block: Dict[str, Any], units: UnitsConfig, default_hi: float) -> np.ndarray:
    """Canonical energy grid from {'E_min', 'E_max', 'points'} given in scenario units"""
    points = block.get("points", 50)
    if isinstance(points, bool) or not isinstance(points, int) or points < 2:
        raise SchemaError(f"must be an integer >= 2, got {points!r}", field="scan.points")
    lo = units.energy_to_canonical(float(block.get("E_min", 4.0 * default_hi)))
    hi = units.energy_to_canonical(float(block.get("E_max", 0.25 * default_hi)))
    if not lo < hi < 0:
        raise SchemaError(f"expected E_min < E_max < 0, got [{lo}, {hi}] (canonical)", field="scan")
    return np.linspace(lo, hi, points)


@dataclass
class RunRecord:
    """Everything one command produced, ready for JSON output"""
    command: str
    scenario: Scenario
    results: Dict[str, Any] = field(default_factory=dict)
    certificates: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            "command": self.command,
            "scenario": self.scenario.name,
            "scenario_sha256": self.scenario.sha256,
            "version": __version__,
            "units": {"hbar": self.scenario.units.hbar, "mass": self.scenario.units.mass},
            "results": self.results,
            "certificates": self.certificates,
            "timings": self.timings,
            "warnings": sorted(set(self.warnings)),
        })
