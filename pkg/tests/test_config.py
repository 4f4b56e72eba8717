# tests/test_config.py

import pytest

from curvebound.config.settings import ConfigManager, CurveboundConfig
from curvebound.errors import SchemaError


def test_defaults_validate():
    config = CurveboundConfig().validate()
    assert config.quadrature.nodes == 256
    assert config.solver.root_rel_tol == 1e-10


def test_toml_overrides(tmp_path, monkeypatch):
    monkeypatch.delenv(ConfigManager.THREADS_ENV_VAR, raising=False)
    path = tmp_path / "settings.toml"
    path.write_text("[quadrature]\nnodes = 128\n\n[solver]\ne_min = -1e4\n", encoding="utf-8")
    config = ConfigManager(path).config
    assert config.quadrature.nodes == 128
    assert config.solver.e_min == -1e4
    assert config.geometry.max_shells == 64


def test_threads_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "settings.toml"
    path.write_text("", encoding="utf-8")
    monkeypatch.setenv(ConfigManager.THREADS_ENV_VAR, "4")
    assert ConfigManager(path).config.solver.threads == 4
    monkeypatch.setenv(ConfigManager.THREADS_ENV_VAR, "many")
    with pytest.raises(SchemaError):
        ConfigManager(path)


@pytest.mark.parametrize(
    "text, field",
    [
        ("[quadrature]\nnodes = 8\n", "quadrature.nodes"),
        ("[quadrature]\nnodes = 1.5\n", "quadrature.nodes"),
        ("[solver]\ne_min = 1.0\n", "solver"),
        ("[solver]\nunknown = 1\n", "solver.unknown"),
        ("[nope]\nx = 1\n", "nope"),
    ],
)
def test_invalid_settings(tmp_path, text, field):
    path = tmp_path / "settings.toml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(SchemaError) as info:
        ConfigManager(path)
    assert info.value.field == field


def test_unreadable_settings(tmp_path):
    with pytest.raises(SchemaError):
        ConfigManager(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("[quadrature\n", encoding="utf-8")
    with pytest.raises(SchemaError):
        ConfigManager(bad)
