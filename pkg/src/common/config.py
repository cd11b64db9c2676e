"""
Configuration Module
YAML configuration loading, environment overrides and logging setup.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

PROJECT_ROOT = Path(__file__).resolve().parents[2]
DEFAULT_CONFIG_PATH = PROJECT_ROOT / 'config' / 'chartforge_config.yaml'
SEED_ENV_VAR = 'CHARTFORGE_SEED'

LOG_FORMAT = '%(asctime)s %(levelname)-7s %(name)s: %(message)s'


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load configuration from a YAML file.

    Args:
        config_path: Path to the YAML file, defaults to config/chartforge_config.yaml

    Returns:
        Configuration dictionary (empty when the file is empty)
    """
    path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    with open(path, 'r', encoding='utf-8') as f:
        return yaml.safe_load(f) or {}


def resolve_seed(cli_seed: Optional[int] = None, default: int = 0) -> int:
    """
    Pick the layout seed: CHARTFORGE_SEED (from the environment or a .env file)
    wins over the command-line value.
    """
    load_dotenv()
    env_value = os.getenv(SEED_ENV_VAR)
    if env_value:
        try:
            return int(env_value)
        except ValueError:
            raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {env_value!r}")
    return cli_seed if cli_seed is not None else default


def configure_logging(config: Dict[str, Any], verbose: bool = False) -> None:
    """Configure the root logger from the `logging` section of the config."""
    level_name = 'DEBUG' if verbose else config.get('logging', {}).get('level', 'WARNING')
    level = getattr(logging, str(level_name).upper(), logging.WARNING)
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def output_directory(config: Dict[str, Any]) -> Path:
    """Resolve and create the configured output directory."""
    directory = Path(config.get('output', {}).get('directory', 'outputs'))
    if not directory.is_absolute():
        directory = PROJECT_ROOT / directory
    directory.mkdir(parents=True, exist_ok=True)
    return directory
