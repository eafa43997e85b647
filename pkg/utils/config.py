"""
Configuration utilities for the cyclo-slv toolkit
"""

import os
import yaml
import logging
from dataclasses import fields
from typing import Dict, Any, Optional, List, Tuple
from dotenv import load_dotenv

from cyclo_slv.core import ScaleGuards
from utils.constants import (
    DEFAULT_FAVARD_CHUNK,
    DEFAULT_FAVARD_NODES,
    DEFAULT_LOG_FILE,
    DEFAULT_N_JOBS,
    DEFAULT_PHI_SAMPLES,
    DEFAULT_EPSILON,
    DEFAULT_SEED,
    MIN_FAVARD_NODES,
)

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)

# Integer environment overrides: variable -> dotted configuration key
INT_OVERRIDES = {
    "CYCLO_MAX_MODULUS": "guards.max_modulus",
    "CYCLO_MAX_DENSE_MODULUS": "guards.max_dense_modulus",
    "CYCLO_MAX_POINTS": "guards.max_points",
    "CYCLO_MAX_CUBOIDS": "guards.max_cuboids",
    "CYCLO_CENSUS_MAX_STATES": "guards.census_max_states",
    "CYCLO_N_JOBS": "parallel.n_jobs",
    "CYCLO_SEED": "run.seed",
    "CYCLO_FAVARD_NODES": "favard.nodes",
}

STRING_OVERRIDES = {
    "CYCLO_LOG_LEVEL": "logging.level",
    "CYCLO_LOG_FILE": "logging.file",
}

DEFAULTS: Dict[str, Any] = {
    "guards": {},
    "parallel": {"n_jobs": DEFAULT_N_JOBS},
    "favard": {"nodes": DEFAULT_FAVARD_NODES, "chunk_size": DEFAULT_FAVARD_CHUNK},
    "slv": {"phi_samples": DEFAULT_PHI_SAMPLES, "epsilon": DEFAULT_EPSILON},
    "run": {"seed": DEFAULT_SEED},
    "logging": {"file": DEFAULT_LOG_FILE, "level": "INFO"},
}


class Config:
    """Configuration manager for the cyclo-slv toolkit"""

    def __init__(self, config_file: Optional[str] = None):
        """
        Initialize configuration from defaults, an optional file and environment variables

        Args:
            config_file: Path to YAML configuration file
        """
        self.config_data = merge_configs({}, DEFAULTS)
        if config_file:
            self.load_from_file(config_file)
        else:
            self._apply_environment_overrides()

    def load_from_file(self, config_file: str) -> bool:
        """
        Load configuration from YAML file

        Args:
            config_file: Path to YAML configuration file

        Returns:
            True if successful, False otherwise
        """
        if not os.path.exists(config_file):
            logger.warning(f"Configuration file not found: {config_file}")
            self._apply_environment_overrides()
            return False

        try:
            with open(config_file, 'r') as f:
                loaded = yaml.safe_load(f) or {}
            if not isinstance(loaded, dict):
                raise ValueError("top level must be a mapping")
            self.config_data = merge_configs(self.config_data, loaded)

            # Apply environment variable overrides
            self._apply_environment_overrides()

            logger.info(f"Loaded configuration from {config_file}")
            return True

        except (OSError, ValueError, yaml.YAMLError) as e:
            logger.error(f"Failed to load configuration from {config_file}: {e}")
            self._apply_environment_overrides()
            return False

    def _apply_environment_overrides(self) -> None:
        """Apply environment variable overrides to the configuration"""
        for env_var, key in INT_OVERRIDES.items():
            if env_var in os.environ:
                try:
                    self.set(key, int(os.environ[env_var]))
                except ValueError:
                    logger.warning(f"Invalid integer in {env_var}: {os.environ[env_var]}")

        for env_var, key in STRING_OVERRIDES.items():
            if env_var in os.environ:
                self.set(key, os.environ[env_var])

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get a configuration value

        Args:
            key: Configuration key (can use dot notation for nested keys)
            default: Default value if key is not found

        Returns:
            Configuration value or default
        """
        value = self.config_data
        for k in key.split("."):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    def set(self, key: str, value: Any) -> None:
        """
        Set a configuration value

        Args:
            key: Configuration key (can use dot notation for nested keys)
            value: Value to set
        """
        keys = key.split(".")
        data = self.config_data
        for k in keys[:-1]:
            if not isinstance(data.get(k), dict):
                data[k] = {}
            data = data[k]
        data[keys[-1]] = value

    def scale_guards(self) -> ScaleGuards:
        """
        Scale ceilings from the ``guards`` section, defaults for missing keys

        Returns:
            ScaleGuards
        """
        section = self.config_data.get("guards") or {}
        known = {f.name for f in fields(ScaleGuards)}
        unknown = sorted(set(section) - known)
        if unknown:
            logger.warning(f"Ignoring unknown guard keys: {unknown}")
        return ScaleGuards(**{k: int(v) for k, v in section.items() if k in known})

    def save_to_file(self, output_file: str) -> bool:
        """
        Save configuration to YAML file

        Args:
            output_file: Path to output YAML file

        Returns:
            True if successful, False otherwise
        """
        try:
            output_dir = os.path.dirname(output_file)
            if output_dir:
                os.makedirs(output_dir, exist_ok=True)

            with open(output_file, 'w') as f:
                yaml.dump(self.config_data, f, default_flow_style=False)

            logger.info(f"Configuration saved to {output_file}")
            return True

        except (OSError, yaml.YAMLError) as e:
            logger.error(f"Failed to save configuration to {output_file}: {e}")
            return False

    def validate(self, section: Optional[str] = None) -> Tuple[bool, List[str]]:
        """
        Validate the configuration, or one section of it

        Args:
            section: Section name (guards, parallel, favard, slv, run); all when None

        Returns:
            (is_valid, error_messages)
        """
        errors = []
        sections = [section] if section else ["guards", "parallel", "favard", "slv", "run"]

        if "guards" in sections:
            known = {f.name for f in fields(ScaleGuards)}
            for key, value in (self.get("guards") or {}).items():
                if key in known and (not isinstance(value, int) or value < 1):
                    errors.append(f"guards.{key} must be a positive integer")

        if "parallel" in sections:
            n_jobs = self.get("parallel.n_jobs")
            if not isinstance(n_jobs, int) or n_jobs == 0:
                errors.append("parallel.n_jobs must be a nonzero integer")

        if "favard" in sections:
            nodes = self.get("favard.nodes")
            if not isinstance(nodes, int) or nodes < MIN_FAVARD_NODES:
                errors.append(f"favard.nodes must be an integer >= {MIN_FAVARD_NODES}")
            chunk = self.get("favard.chunk_size")
            if not isinstance(chunk, int) or chunk < 1:
                errors.append("favard.chunk_size must be a positive integer")

        if "slv" in sections:
            samples = self.get("slv.phi_samples")
            if not isinstance(samples, int) or samples < 1:
                errors.append("slv.phi_samples must be a positive integer")

        if "run" in sections:
            seed = self.get("run.seed")
            if not isinstance(seed, int) or seed < 0:
                errors.append("run.seed must be a nonnegative integer")

        return len(errors) == 0, errors

    def merge(self, override_config: Dict[str, Any]) -> None:
        """
        Merge override configuration into this configuration

        Args:
            override_config: Override configuration
        """
        self.config_data = merge_configs(self.config_data, override_config)

    def get_all(self) -> Dict[str, Any]:
        return self.config_data


def merge_configs(
    base_config: Dict[str, Any],
    override_config: Dict[str, Any]
) -> Dict[str, Any]:
    """
    Merge two configuration dictionaries

    Args:
        base_config: Base configuration
        override_config: Override configuration

    Returns:
        Merged configuration
    """
    result = dict(base_config)

    for key, value in override_config.items():
        if isinstance(value, dict) and key in result and isinstance(result[key], dict):
            result[key] = merge_configs(result[key], value)
        elif isinstance(value, dict):
            result[key] = merge_configs({}, value)
        else:
            result[key] = value

    return result
