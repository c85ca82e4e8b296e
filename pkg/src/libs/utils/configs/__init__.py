import json
import os
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator

from libs.interfaces.errors import ConfigError
from libs.utils.pylog import Logger, LogLevel

logger = Logger(__name__)

DEFAULT_PATH: str = os.path.join("data", "config.json")


class CostModelSettings(BaseModel):
    # Flat surcharge per description, in bits.
    c_machine: int = Field(64, ge=0)


class FlatEncoderSettings(BaseModel):
    retry_budget: int = Field(64, ge=1)
    # Largest sampler input length verified by exhausting {0,1}^ell.
    exhaustive_ell: int = Field(20, ge=1, le=24)
    # Number of sampled inputs used to verify longer samplers.
    sample_checks: int = Field(4096, ge=1)


class GroupSettings(BaseModel):
    closure_cap: int = Field(100_000, ge=1)
    perm_rep_cap: int = Field(4096, ge=1)


class HarnessSettings(BaseModel):
    t: int = Field(1024, ge=1)
    block: Optional[int] = Field(None, ge=1)
    aut_extra_samples: int = Field(8, ge=0)
    witness_budget: int = Field(100_000, ge=1)


class LoggingSettings(BaseModel):
    level: str = "WARNING"

    @field_validator("level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        if value.upper() not in LogLevel.__members__:
            raise ValueError(f"unknown log level {value!r}")
        return value.upper()


class Settings(BaseModel):
    """Everything data/config.json may set. Missing keys take these defaults."""
    cost_model: CostModelSettings = Field(default_factory=CostModelSettings)
    flat_encoder: FlatEncoderSettings = Field(default_factory=FlatEncoderSettings)
    groups: GroupSettings = Field(default_factory=GroupSettings)
    harness: HarnessSettings = Field(default_factory=HarnessSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)


# Loads the settings configuration from 'data/config.json'.
def loadsConfig(path: Optional[str] = None) -> Settings:
    """
    Loads the settings from a JSON file (default 'data/config.json').
    If the file is missing or not valid JSON, returns the defaults.

    Args:
        path: The JSON file to read.

    Raises:
        ConfigError: If the file parses but holds values of the wrong shape.

    Returns:
        The validated Settings.
    """
    target: str = path or DEFAULT_PATH
    try:
        with open(target, "r", encoding="utf-8") as f:
            raw: Dict[str, Any] = json.load(f)
    except (FileNotFoundError, json.JSONDecodeError) as e:
        logger.warning(f"Could not load {target} ({e}). Returning defaults.")
        return Settings()

    try:
        return Settings.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid settings in {target}\n|- {e}")


# Saves the settings configuration to 'data/config.json'.
def savesConfig(settings: Settings, path: Optional[str] = None) -> None:
    """
    Saves the settings to a JSON file, creating its directory if needed.

    Args:
        settings: The settings to save.
        path: The JSON file to write (default 'data/config.json').
    """
    target: str = path or DEFAULT_PATH
    try:
        directory: str = os.path.dirname(target)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            json.dump(settings.model_dump(), f, indent=4)
        logger.info(f"Settings saved to {target}.")
    except OSError as e:
        logger.error(f"Failed to save settings: {e}")
