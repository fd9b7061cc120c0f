"""
Configuration loader and manager

Defaults live in config/config.yaml; any key may be overridden from the
environment (or a .env file) as TPC_<SECTION>_<KEY>.
"""
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from loguru import logger
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..exceptions import ConfigurationError


PROJECT_ROOT = Path(__file__).parent.parent.parent
DEFAULT_CONFIG_PATH = PROJECT_ROOT / "config" / "config.yaml"


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load configuration from YAML file

    Args:
        config_path: Path to config file. If None, uses default path.

    Returns:
        Configuration dictionary
    """
    if config_path is None:
        config_path = DEFAULT_CONFIG_PATH

    try:
        with open(config_path, 'r') as f:
            config = yaml.safe_load(f) or {}
        logger.debug(f"Configuration loaded from {config_path}")
        return config
    except FileNotFoundError:
        logger.error(f"Configuration file not found: {config_path}")
        raise ConfigurationError(f"configuration file not found: {config_path}")
    except yaml.YAMLError as e:
        logger.error(f"Error parsing configuration file: {e}")
        raise ConfigurationError(f"cannot parse {config_path}: {e}")


def flatten_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """
    Flatten {section: {key: value}} into {section_key: value}

    Args:
        config: Nested configuration dictionary

    Returns:
        Flat dictionary matching Settings field names
    """
    flat = {}
    for section, values in config.items():
        if section == "app" or not isinstance(values, dict):
            continue
        for key, value in values.items():
            flat[f"{section}_{key}"] = value
    return flat


class Settings(BaseSettings):
    """Numeric and logging settings (environment > YAML > defaults)"""

    model_config = SettingsConfigDict(
        env_prefix="TPC_",
        env_file=".env",
        extra="ignore",
    )

    solver_tol: float = Field(1e-10, ge=1e-12, lt=1e-2)
    solver_rtol: float = Field(1e-10, gt=0)
    solver_atol: float = Field(1e-11, gt=0)
    solver_start_radius: float = Field(1e-6, gt=0, lt=1e-2)
    solver_grid_points: int = Field(2048, ge=16)
    solver_max_iterations: int = Field(200, ge=1)

    rearrangement_max_layers: int = Field(64, ge=2)
    rearrangement_sliver: float = Field(1e-12, gt=0)
    rearrangement_set_tol: float = Field(1e-8, gt=0)
    rearrangement_max_iter: int = Field(50, ge=1)

    experiments_contrasts: List[float] = Field(default_factory=lambda: [1.001, 1.01, 1.05, 1.1])
    experiments_workers: int = Field(1, ge=1)

    logging_level: str = "WARNING"
    logging_dir: Optional[str] = None

    @classmethod
    def settings_customise_sources(cls, settings_cls, init_settings, env_settings,
                                   dotenv_settings, file_secret_settings):
        # Environment wins over the YAML values passed as init kwargs
        return env_settings, dotenv_settings, init_settings, file_secret_settings


_active_config_path: Optional[str] = None


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Build the settings object for the active configuration file

    config/config.yaml is used unless use_config() selected another file;
    a missing default file falls back to built-in defaults.

    Returns:
        Cached Settings instance
    """
    config_path = _active_config_path
    if config_path is None and not DEFAULT_CONFIG_PATH.exists():
        logger.debug("No config/config.yaml found, using built-in defaults")
        config = {}
    else:
        config = load_config(config_path)

    try:
        return Settings(**flatten_config(config))
    except ValueError as e:
        raise ConfigurationError(f"invalid settings: {e}".splitlines()[0])


def reset_settings() -> None:
    """Drop cached settings so the next call re-reads file and environment"""
    get_settings.cache_clear()


def use_config(config_path: Optional[str] = None) -> Settings:
    """
    Select the YAML file behind get_settings() and reload

    Args:
        config_path: YAML file, None for config/config.yaml

    Returns:
        The freshly loaded settings
    """
    global _active_config_path
    _active_config_path = None if config_path is None else str(config_path)
    reset_settings()
    return get_settings()
