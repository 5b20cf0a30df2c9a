"""Configuration loader for btcgp"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv

from btcgp.errors import ConfigError

ENV_PREFIX = "BTCGP_"

DEFAULT_THREADS = os.cpu_count() or 1
DEFAULT_DENSE_CHECK_LIMIT = 2000        # check_predictive_pd refuses larger n*
DEFAULT_SAMPLE_LIMIT = 5000             # dense GP sampling refuses larger n
DEFAULT_FOLDS = 5

# --- Training defaults ---
DEFAULT_MAX_ITERS = 200
DEFAULT_GRAD_TOL = 1e-5                 # inf-norm of the log-space gradient
DEFAULT_FD_STEP = 1e-4                  # central differences in log-space
DEFAULT_MAX_BACKTRACKS = 30
DEFAULT_MAX_LOG_STEP = 2.0
PILOT_WINDOW = 400

# --- Numerical guards ---
SYMMETRY_TOL = 1e-12
PIVOT_FLOOR = 1e-300
SAMPLE_JITTER = 1e-10                   # relative to signal variance
PESSIMISTIC_BANDWIDTH = 1000

# --- Output ---
DEFAULT_OUTPUT_DIR = "./out"
DEFAULT_AUDIT_DIR = "./audit_logs"
DEFAULT_LOG_LEVEL = "INFO"


class Config:
    """Configuration manager for btcgp

    Loads configuration from:
    1. Environment variables (``BTCGP_*``, ``.env`` file honoured)
    2. JSON or YAML configuration file
    3. Default values
    """

    def __init__(self, config_file: Optional[str] = None):
        """Initialize configuration

        Args:
            config_file: Optional path to a JSON or YAML config file
        """
        load_dotenv()

        self.file_config: Dict[str, Any] = {}
        if config_file and Path(config_file).exists():
            self.file_config = _read_mapping(Path(config_file))

        self.config = self._build_config()

    def _build_config(self) -> Dict[str, Any]:
        """Build configuration from all sources

        Priority: ENV vars > config file > defaults
        """
        return {
            'threads': self._get_int('threads', DEFAULT_THREADS),
            'dense_check_limit': self._get_int('dense_check_limit', DEFAULT_DENSE_CHECK_LIMIT),
            'sample_limit': self._get_int('sample_limit', DEFAULT_SAMPLE_LIMIT),
            'default_folds': self._get_int('default_folds', DEFAULT_FOLDS),

            # Training
            'max_iters': self._get_int('max_iters', DEFAULT_MAX_ITERS),
            'grad_tol': self._get_float('grad_tol', DEFAULT_GRAD_TOL),
            'fd_step': self._get_float('fd_step', DEFAULT_FD_STEP),

            # Output
            'output_dir': self._get('output_dir', DEFAULT_OUTPUT_DIR),
            'enable_audit': self._get_bool('enable_audit', False),
            'audit_dir': self._get('audit_dir', DEFAULT_AUDIT_DIR),
            'log_level': str(self._get('log_level', DEFAULT_LOG_LEVEL)).upper(),
        }

    def _get(self, key: str, default: Any = None) -> Any:
        """Get configuration value

        Priority: ENV var (BTCGP_<KEY>) > config file (lowercase key) > default
        """
        env_value = os.getenv(ENV_PREFIX + key.upper())
        if env_value is not None:
            return env_value

        if key in self.file_config:
            return self.file_config[key]

        return default

    def _get_int(self, key: str, default: int = 0) -> int:
        value = self._get(key, default)
        try:
            return int(value)
        except (ValueError, TypeError):
            return default

    def _get_float(self, key: str, default: float = 0.0) -> float:
        value = self._get(key, default)
        try:
            return float(value)
        except (ValueError, TypeError):
            return default

    def _get_bool(self, key: str, default: bool = False) -> bool:
        value = self._get(key, default)
        if isinstance(value, bool):
            return value
        if isinstance(value, str):
            return value.lower() in ('true', '1', 'yes', 'on')
        return default

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value by key"""
        return self.config.get(key, default)

    def to_dict(self) -> Dict[str, Any]:
        """Get configuration as dictionary"""
        return self.config.copy()

    def validate(self) -> List[str]:
        """Validate configuration and return list of issues

        Returns:
            List of validation error messages (empty if valid)
        """
        issues = []

        for key in ('threads', 'dense_check_limit', 'sample_limit', 'max_iters'):
            if self.config.get(key, 0) < 1:
                issues.append(f"{key} must be at least 1")

        if self.config.get('default_folds', 0) < 2:
            issues.append("default_folds must be at least 2")

        for key in ('grad_tol', 'fd_step'):
            if self.config.get(key, 0.0) <= 0:
                issues.append(f"{key} must be greater than 0")

        if not isinstance(logging.getLevelName(self.config.get('log_level')), int):
            issues.append(f"unknown log_level {self.config.get('log_level')!r}")

        return issues


def _read_mapping(path: Path) -> Dict[str, Any]:
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(text) or {}
        else:
            data = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level")
    return data
