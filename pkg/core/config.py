"""Configuration loader -- reads config.yaml + .env, validates with Pydantic.

Resolves ${ENV_VAR} references in YAML values from environment variables.
Fails fast with clear errors if the config is invalid.
"""

from __future__ import annotations

import logging
import os
import re
from pathlib import Path
from typing import Any, Literal

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

from core.models.theory import Interpretation, SaddleOptions
from core.models.verdicts import DetectorConfig

logger = logging.getLogger(__name__)

# Default home directory for config.yaml, .env and outputs
DEFAULT_HOME = Path.home() / ".arbvol"

OutputFormat = Literal["csv", "json", "svg"]


def _resolve_env_vars(value: Any) -> Any:
    """Recursively resolve ${ENV_VAR} references in config values."""
    if isinstance(value, str):
        pattern = re.compile(r"\$\{(\w+)\}")
        def replacer(match: re.Match) -> str:
            var_name = match.group(1)
            env_value = os.environ.get(var_name)
            if env_value is None:
                logger.warning("Environment variable %s not set", var_name)
                return match.group(0)  # leave unresolved
            return env_value
        return pattern.sub(replacer, value)
    elif isinstance(value, dict):
        return {k: _resolve_env_vars(v) for k, v in value.items()}
    elif isinstance(value, list):
        return [_resolve_env_vars(item) for item in value]
    return value


# ---------------------------------------------------------------------------
# Config models (Pydantic)
# ---------------------------------------------------------------------------

class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    # Empty means <home>/output; ARBVOL_OUTPUT_DIR overrides either
    output_dir: str = ""
    formats: list[OutputFormat] = Field(default_factory=lambda: ["csv", "json", "svg"])


class SweepDefaults(BaseModel):
    """Desk-scale defaults for sweeps launched from the CLI."""

    model_config = ConfigDict(extra="forbid")

    N: int = Field(default=64, ge=2)
    realizations: int = Field(default=50, ge=1)
    parallelism: int = Field(default=1, ge=1)
    master_seed: int = Field(default=0, ge=0, lt=2**64)


class TheoryConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    interpretation: Interpretation = "direct"
    saddle: SaddleOptions = Field(default_factory=SaddleOptions)


class LoggingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    level: str = "INFO"


class AppConfig(BaseModel):
    """Top-level application configuration."""

    model_config = ConfigDict(extra="forbid")

    home_dir: str = str(DEFAULT_HOME)
    output: OutputConfig = Field(default_factory=OutputConfig)
    detector: DetectorConfig = Field(default_factory=DetectorConfig)
    sweep: SweepDefaults = Field(default_factory=SweepDefaults)
    theory: TheoryConfig = Field(default_factory=TheoryConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @property
    def home_path(self) -> Path:
        """Resolved home directory as a Path."""
        return Path(self.home_dir).expanduser()

    @property
    def output_path(self) -> Path:
        """Directory that receives CSV / JSON / SVG outputs."""
        if self.output.output_dir:
            return Path(self.output.output_dir).expanduser()
        return self.home_path / "output"


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def load_config(
    config_path: str | Path | None = None,
    env_path: str | Path | None = None,
    *,
    create_dirs: bool = True,
) -> AppConfig:
    """Load configuration from YAML + .env files.

    1. Load .env into environment variables
    2. Load config.yaml and resolve ${ENV_VAR} references
    3. Apply ARBVOL_HOME / ARBVOL_OUTPUT_DIR overrides
    4. Validate against Pydantic models
    5. Create the output directory if needed
    """
    home = Path(os.environ.get("ARBVOL_HOME", str(DEFAULT_HOME))).expanduser()

    if env_path is None:
        env_path = home / ".env"
    if config_path is None:
        config_path = home / "config.yaml"

    env_path = Path(env_path)
    config_path = Path(config_path)

    if env_path.exists():
        load_dotenv(env_path)
        logger.info("Loaded environment from %s", env_path)
    else:
        logger.debug("No .env file at %s", env_path)

    raw_config: dict = {}
    if config_path.exists():
        with open(config_path) as f:
            raw_config = yaml.safe_load(f) or {}
        if not isinstance(raw_config, dict):
            raise ValueError(f"{config_path} must contain a mapping at the top level")
        logger.info("Loaded config from %s", config_path)
    else:
        logger.debug("No config file at %s, using defaults", config_path)

    resolved = _resolve_env_vars(raw_config)

    if "ARBVOL_HOME" in os.environ:
        resolved["home_dir"] = os.environ["ARBVOL_HOME"]
    if os.environ.get("ARBVOL_OUTPUT_DIR"):
        resolved.setdefault("output", {})["output_dir"] = os.environ["ARBVOL_OUTPUT_DIR"]

    config = AppConfig(**resolved)

    if create_dirs:
        config.output_path.mkdir(parents=True, exist_ok=True)

    return config
