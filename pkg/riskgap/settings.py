"""
Settings - Layered configuration: YAML file, then environment (.env), then CLI flags
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from riskgap.exceptions import InvalidInputError
from riskgap.learners import MAX_DIM, MAX_SAMPLE
from riskgap.synthgen import MIN_M_TEST
from riskgap.theorem_engine import RegistryEntry, ScenarioConfig

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path("config") / "config.yaml"


class ErmSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_dim: int = Field(MAX_DIM, ge=1, le=MAX_DIM)
    max_sample: int = Field(MAX_SAMPLE, ge=1, le=MAX_SAMPLE)


class ManifoldSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_expansions: int = Field(10_000_000, ge=1)
    strict_self_intersection: bool = False


class ValidationSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    m_test: int = Field(100_000, ge=MIN_M_TEST)
    workers: int = Field(1, ge=1)
    beta_sample_size: int = Field(2000, ge=2)


class FigureSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    points_per_axis: int = Field(26, ge=2)
    min_exponent: float = 2.0
    max_exponent: float = 7.0


class LoggingSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    level: str = "INFO"


class Settings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    erm: ErmSettings = Field(default_factory=ErmSettings)
    manifold: ManifoldSettings = Field(default_factory=ManifoldSettings)
    validation: ValidationSettings = Field(default_factory=ValidationSettings)
    figures: FigureSettings = Field(default_factory=FigureSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)


def read_yaml(path) -> Any:
    """Read a YAML (or JSON, which is valid YAML) document."""
    try:
        with open(path, "r") as f:
            return yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise InvalidInputError(f"could not parse {path}: {e}") from e


def load_settings(path: Optional[str] = None) -> Settings:
    """Load settings from YAML with environment overrides.

    The file is taken from ``path``, else ``RISKGAP_CONFIG``, else
    ``config/config.yaml`` when it exists. ``RISKGAP_LOG_LEVEL`` and
    ``RISKGAP_WORKERS`` override the file.
    """
    load_dotenv()

    config_path = path or os.getenv("RISKGAP_CONFIG")
    if config_path is None and DEFAULT_CONFIG_PATH.exists():
        config_path = str(DEFAULT_CONFIG_PATH)

    raw: Dict[str, Any] = {}
    if config_path:
        if not Path(config_path).exists():
            raise InvalidInputError(f"config file does not exist: {config_path}")
        raw = read_yaml(config_path) or {}
        if not isinstance(raw, dict):
            raise InvalidInputError(f"config file {config_path} must hold a mapping")

    level = os.getenv("RISKGAP_LOG_LEVEL")
    if level:
        raw.setdefault("logging", {})["level"] = level.upper()
    workers = os.getenv("RISKGAP_WORKERS")
    if workers:
        raw.setdefault("validation", {})["workers"] = workers

    try:
        settings = Settings.model_validate(raw)
    except ValidationError as e:
        raise InvalidInputError(f"invalid configuration: {e}") from e
    logger.debug(f"Loaded settings from {config_path or 'defaults'}")
    return settings


def scenario_defaults(settings: Settings, raw: Dict[str, Any]) -> Dict[str, Any]:
    """Scenario fields the settings file supplies when the scenario leaves them out."""
    defaults: Dict[str, Any] = {
        "m_test": settings.validation.m_test,
        "erm_max_dim": settings.erm.max_dim,
        "erm_max_sample": settings.erm.max_sample,
        "max_expansions": settings.manifold.max_expansions,
        "strict_self_intersection": settings.manifold.strict_self_intersection,
    }
    # only a sampled beta needs a sample size
    if raw.get("example") == "cluster" and raw.get("beta") is None:
        defaults["beta_sample_size"] = settings.validation.beta_sample_size
    return {key: value for key, value in defaults.items() if key not in raw}


def load_scenario(path: str, settings: Optional[Settings] = None) -> ScenarioConfig:
    """Load a scenario file; fields it omits fall back to ``settings`` when given."""
    raw = read_yaml(path)
    if not isinstance(raw, dict):
        raise InvalidInputError(f"scenario file {path} must hold a mapping")
    if settings is not None:
        raw = {**raw, **scenario_defaults(settings, raw)}
    try:
        return ScenarioConfig.model_validate(raw)
    except ValidationError as e:
        raise InvalidInputError(f"invalid scenario {path}: {e}") from e


def load_registry(path: str) -> List[RegistryEntry]:
    """Load a feature-learner registry: a list of {name, feature_learner, hypothesis_learner, test, params}."""
    if str(path).endswith(".json"):
        with open(path, "r") as f:
            try:
                raw = json.load(f)
            except json.JSONDecodeError as e:
                raise InvalidInputError(f"could not parse {path}: {e}") from e
    else:
        raw = read_yaml(path)
    if isinstance(raw, dict) and "entries" in raw:
        raw = raw["entries"]
    if not isinstance(raw, list) or not raw:
        raise InvalidInputError(f"registry {path} must be a non-empty list of entries")
    try:
        return [RegistryEntry.model_validate(item) for item in raw]
    except ValidationError as e:
        raise InvalidInputError(f"invalid registry entry in {path}: {e}") from e
