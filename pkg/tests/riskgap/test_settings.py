"""
Unit tests for settings, scenario and registry loading
"""

from pathlib import Path

import pytest

from riskgap.exceptions import InvalidInputError
from riskgap.settings import load_registry, load_scenario, load_settings

REPO_ROOT = Path(__file__).resolve().parents[2]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("RISKGAP_CONFIG", "RISKGAP_LOG_LEVEL", "RISKGAP_WORKERS"):
        monkeypatch.delenv(name, raising=False)


def test_defaults_without_file(tmp_path, monkeypatch):
    """Test built-in defaults when no config file exists."""
    monkeypatch.chdir(tmp_path)
    settings = load_settings()
    assert settings.erm.max_sample == 2000
    assert settings.manifold.max_expansions == 10_000_000
    assert settings.figures.points_per_axis == 26
    assert settings.validation.workers == 1


def test_shipped_config_loads():
    """Test the configuration file in the repository."""
    settings = load_settings(str(REPO_ROOT / "config" / "config.yaml"))
    assert settings.logging.level == "INFO"


def test_yaml_values_and_env_overrides(tmp_path, monkeypatch):
    """Test that environment variables override the file."""
    config = tmp_path / "config.yaml"
    config.write_text("validation:\n  workers: 2\nlogging:\n  level: WARNING\n")
    monkeypatch.setenv("RISKGAP_CONFIG", str(config))
    assert load_settings().validation.workers == 2
    monkeypatch.setenv("RISKGAP_WORKERS", "6")
    monkeypatch.setenv("RISKGAP_LOG_LEVEL", "debug")
    settings = load_settings()
    assert settings.validation.workers == 6
    assert settings.logging.level == "DEBUG"


def test_invalid_config(tmp_path):
    """Test configuration errors."""
    with pytest.raises(InvalidInputError):
        load_settings(str(tmp_path / "missing.yaml"))
    unknown = tmp_path / "unknown.yaml"
    unknown.write_text("database:\n  host: localhost\n")
    with pytest.raises(InvalidInputError):
        load_settings(str(unknown))
    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("42\n")
    with pytest.raises(InvalidInputError):
        load_settings(str(scalar))


def test_shipped_scenarios():
    """Test the scenario files in the repository."""
    ring = load_scenario(str(REPO_ROOT / "config" / "scenarios" / "ring_and_disc.yaml"))
    assert ring.example == "cluster" and ring.world.kind == "ring_and_disc"
    snake = load_scenario(str(REPO_ROOT / "config" / "scenarios" / "snake_tube.yaml"))
    assert snake.example == "manifold" and snake.gamma_len == 10.0 and snake.j == 3


def test_invalid_scenario(tmp_path):
    """Test that a manifold scenario without gamma_len is rejected."""
    path = tmp_path / "s.yaml"
    path.write_text("example: manifold\nq: 10\nworld:\n  kind: straight_tube\nm_u: 100\nm_l: 10\ndelta: 0.05\n")
    with pytest.raises(InvalidInputError):
        load_scenario(str(path))


def test_scenario_defaults_come_from_settings(tmp_path):
    """Test that fields a scenario omits are filled from the settings file."""
    config = tmp_path / "config.yaml"
    config.write_text(
        "erm:\n  max_dim: 2\n  max_sample: 1500\n"
        "validation:\n  m_test: 50000\n  beta_sample_size: 800\n"
        "manifold:\n  max_expansions: 5000\n"
    )
    settings = load_settings(str(config))
    path = tmp_path / "s.yaml"
    path.write_text("example: cluster\nq: 10\nworld:\n  kind: two_blob\nm_u: 1000\nm_l: 10\ndelta: 0.05\n")
    cfg = load_scenario(str(path), settings)
    assert cfg.m_test == 50_000
    assert cfg.erm_max_dim == 2
    assert cfg.erm_max_sample == 1500
    assert cfg.beta_sample_size == 800
    assert cfg.max_expansions == 5000
    # without settings the model defaults apply
    assert load_scenario(str(path)).m_test == 100_000


def test_scenario_values_beat_settings(tmp_path):
    """Test that explicit scenario fields are kept over settings defaults."""
    settings = load_settings(str(REPO_ROOT / "config" / "config.yaml"))
    ring = load_scenario(str(REPO_ROOT / "config" / "scenarios" / "ring_and_disc.yaml"), settings)
    assert ring.beta_sample_size == 1000
    assert ring.m_test == 100_000
    assert ring.erm_max_sample == settings.erm.max_sample
    snake = load_scenario(str(REPO_ROOT / "config" / "scenarios" / "snake_tube.yaml"), settings)
    assert snake.beta_sample_size is None


def test_erm_settings_outside_exactness_window(tmp_path):
    """Test that ERM limits beyond the exact window are rejected."""
    config = tmp_path / "config.yaml"
    config.write_text("erm:\n  max_dim: 4\n")
    with pytest.raises(InvalidInputError):
        load_settings(str(config))


def test_registry_formats(tmp_path):
    """Test YAML and JSON registries."""
    entries = load_registry(str(REPO_ROOT / "config" / "registry.example.yaml"))
    assert [e.name for e in entries] == ["identity", "clusters-q10", "identity-1nn", "curve-q20"]
    path = tmp_path / "registry.json"
    path.write_text('[{"name": "id", "feature_learner": "identity", "hypothesis_learner": "one_nn"}]')
    assert load_registry(str(path))[0].test == "none"
    empty = tmp_path / "empty.yaml"
    empty.write_text("entries: []\n")
    with pytest.raises(InvalidInputError):
        load_registry(str(empty))
    wrong = tmp_path / "wrong.yaml"
    wrong.write_text("- name: x\n  feature_learner: pca\n  hypothesis_learner: one_nn\n")
    with pytest.raises(InvalidInputError):
        load_registry(str(wrong))


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
