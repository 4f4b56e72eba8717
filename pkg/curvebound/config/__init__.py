from .settings import (
    ConfigManager,
    CurveboundConfig,
    GeometryConfig,
    LoggingConfig,
    OutputConfig,
    QuadratureConfig,
    SolverConfig,
)

__all__ = [
    "ConfigManager",
    "CurveboundConfig",
    "GeometryConfig",
    "LoggingConfig",
    "OutputConfig",
    "QuadratureConfig",
    "SolverConfig",
]
