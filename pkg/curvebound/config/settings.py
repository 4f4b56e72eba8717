# config/settings.py

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

import tomli

from ..errors import SchemaError


@dataclass(frozen=True)
class QuadratureConfig:
    """Node counts and rules used by the principal-operator quadratures"""
    nodes: int = 256
    panel_order: int = 16
    grading_ratio: float = 0.5
    innermost_fraction: float = 1e-10
    log_time_step: float = 0.25
    arclength_panels: int = 512
    chunk_size: int = 16384


@dataclass(frozen=True)
class GeometryConfig:
    image_rel_tol: float = 1e-12
    max_shells: int = 64


@dataclass(frozen=True)
class SolverConfig:
    root_rel_tol: float = 1e-10
    e_min: float = -1e8
    e_max_2d: float = -1e-12
    seed_offset: float = 1e-3
    max_doublings: int = 200
    threads: int = 1


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    json_indent: int = 2


@dataclass(frozen=True)
class LoggingConfig:
    level: str = "INFO"


@dataclass(frozen=True)
class CurveboundConfig:
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    def validate(self) -> "CurveboundConfig":
        q = self.quadrature
        if q.nodes < 32:
            raise SchemaError(f"must be >= 32, got {q.nodes}", field="quadrature.nodes")
        if q.panel_order < 2:
            raise SchemaError(f"must be >= 2, got {q.panel_order}", field="quadrature.panel_order")
        if not 0.0 < q.grading_ratio < 1.0:
            raise SchemaError(f"must lie in (0, 1), got {q.grading_ratio}",
                              field="quadrature.grading_ratio")
        for name in ("innermost_fraction", "log_time_step"):
            if getattr(q, name) <= 0:
                raise SchemaError("must be positive", field=f"quadrature.{name}")
        if self.geometry.image_rel_tol <= 0:
            raise SchemaError("must be positive", field="geometry.image_rel_tol")
        if self.geometry.max_shells < 1:
            raise SchemaError("must be >= 1", field="geometry.max_shells")
        s = self.solver
        if s.root_rel_tol <= 0:
            raise SchemaError("must be positive", field="solver.root_rel_tol")
        if s.e_min >= 0 or s.e_max_2d >= 0:
            raise SchemaError("energy limits must be negative", field="solver")
        if s.threads < 1:
            raise SchemaError("must be >= 1", field="solver.threads")
        return self

    def with_overrides(self, overrides: Dict[str, Dict[str, Any]]) -> "CurveboundConfig":
        """Return a copy with section values replaced, e.g. {'solver': {'e_min': -1e4}}"""
        updated = self
        for section_name, values in overrides.items():
            section = getattr(updated, section_name, None)
            if section is None:
                raise SchemaError("unknown settings section", field=section_name)
            updated = replace(updated, **{section_name: _merge_section(section, values, section_name)})
        return updated.validate()


def _merge_section(section: Any, values: Dict[str, Any], prefix: str) -> Any:
    known = {f.name: f for f in fields(section)}
    changes = {}
    for key, value in values.items():
        if key not in known:
            raise SchemaError("unknown setting", field=f"{prefix}.{key}")
        default = getattr(section, key)
        if isinstance(default, bool) or not isinstance(default, (int, float, str)):
            changes[key] = value
        elif isinstance(default, str):
            if not isinstance(value, str):
                raise SchemaError("expected a string", field=f"{prefix}.{key}")
            changes[key] = value
        elif isinstance(default, int) and not isinstance(default, bool):
            if isinstance(value, bool) or not isinstance(value, int):
                raise SchemaError("expected an integer", field=f"{prefix}.{key}")
            changes[key] = value
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise SchemaError("expected a number", field=f"{prefix}.{key}")
            changes[key] = float(value)
    return replace(section, **changes)


class ConfigManager:
    """Loads settings from TOML, falling back to built-in defaults"""

    ENV_VAR = "CURVEBOUND_CONFIG"
    THREADS_ENV_VAR = "CURVEBOUND_THREADS"

    def __init__(self, config_path: Optional[Path] = None):
        self.config_path = config_path or self._find_config()
        self.config = self._load()

    def _find_config(self) -> Optional[Path]:
        candidates = []
        env_path = os.environ.get(self.ENV_VAR)
        if env_path:
            candidates.append(Path(env_path))
        candidates.append(Path.cwd() / "curvebound.toml")
        candidates.append(Path.home() / ".config" / "curvebound" / "config.toml")
        for path in candidates:
            if path.expanduser().is_file():
                return path.expanduser()
        return None

    def _load(self) -> CurveboundConfig:
        config = CurveboundConfig()
        if self.config_path is not None:
            try:
                with open(self.config_path, "rb") as f:
                    data = tomli.load(f)
            except OSError as e:
                raise SchemaError(f"cannot read settings file {self.config_path}: {e}")
            except tomli.TOMLDecodeError as e:
                raise SchemaError(f"invalid TOML in {self.config_path}: {e}")
            config = config.with_overrides(data)
        threads = os.environ.get(self.THREADS_ENV_VAR)
        if threads:
            try:
                config = config.with_overrides({"solver": {"threads": int(threads)}})
            except ValueError:
                raise SchemaError(f"expected an integer, got {threads!r}", field=self.THREADS_ENV_VAR)
        return config.validate()
