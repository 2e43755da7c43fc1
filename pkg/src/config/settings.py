"""
Configuration management for the wave asymptotics toolkit
Loads defaults, YAML files and line-oriented key = value files
"""

import copy
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from utils.errors import ConfigError
from utils.param_parser import ParameterParser

DEFAULT_CONFIG: Dict[str, Any] = {
    'ode': {
        'w0': 1e-5,
        'tol': 1e-10,
        'samples_per_wavelength': 32,
        'window_fraction': 0.4,
    },
    'singulant': {
        'clearance': 1e-6,
        'quad_tol': 1e-12,
        'path_tol': 1e-10,
        'max_arc': 4.0,
        'box': 4.0,
    },
    'recurrence': {
        'n_max': 2000,
        'coalescing_n_max': 2000,
        'corrections': 4,
        'branch_tol': 0.1,
        'convergence_tol': 1e-2,
    },
    'sweep': {
        'n_points': 40,
        'workers': 1,
        'fig10_tol': 1e-12,
        'omega_n_max': 1000,
    },
    'acceptance': {
        'omega_one_third_target': 0.351,
        'omega_one_third_tol': 0.005,
        'toy_drift_tol': 1e-3,
        'fit_tol': 1e-3,
        'branch_tail_tol': 1e-2,
        'beta_zero_tol': 0.03,
        'beta_infinity_tol': 0.05,
        'fig3_tol': 0.20,
        'fig10_coalescing_tol': 0.25,
        'fig10_separated_tol': 0.20,
        'singulant_tol': 1e-8,
        'stokes_gap_tol': 0.01,
        'wavelength_tol': 0.05,
        'oracle_tol': 1e-14,
    },
    'output': {
        'precision': 15,
    },
    'logging': {
        'level': 'INFO',
        'log_to_file': False,
        'log_dir': 'logs',
    },
}


class ConfigManager:
    """Holds toolkit settings with dotted-key access"""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """
        Initialize configuration

        Args:
            config: Optional overrides merged on top of DEFAULT_CONFIG
        """
        self.logger = logging.getLogger(__name__)
        self.parser = ParameterParser()
        self.config: Dict[str, Any] = copy.deepcopy(DEFAULT_CONFIG)
        self.source: Optional[Path] = None

        if config:
            self.update(config)

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get a setting by dotted key, e.g. 'ode.tol'

        Args:
            key: Dotted key
            default: Value returned when the key is missing

        Returns:
            The setting value or default
        """
        node: Any = self.config
        for part in key.split('.'):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def set(self, key: str, value: Any):
        """Set a setting by dotted key, creating sections as needed"""
        if isinstance(value, str):
            # YAML 1.1 reads exponent floats without a dot (1e-10) as strings
            for convert in (int, float):
                try:
                    value = convert(value)
                    break
                except ValueError:
                    continue
        parts = key.split('.')
        node = self.config
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"'{part}' in '{key}' is not a section")
        node[parts[-1]] = value

    def section(self, name: str) -> Dict[str, Any]:
        """Return a copy of one configuration section"""
        return dict(self.config.get(name, {}))

    def update(self, values: Dict[str, Any]):
        """
        Merge nested or dotted-key values into the configuration

        Args:
            values: Mapping such as {'ode': {'tol': 1e-12}} or {'ode.tol': 1e-12}
        """
        for key, value in values.items():
            if isinstance(value, dict) and '.' not in key:
                for sub_key, sub_value in self._flatten(value, key).items():
                    self.set(sub_key, sub_value)
            else:
                self.set(key, value)

    @classmethod
    def _flatten(cls, values: Dict[str, Any], prefix: str) -> Dict[str, Any]:
        flat = {}
        for key, value in values.items():
            dotted = f"{prefix}.{key}"
            if isinstance(value, dict):
                flat.update(cls._flatten(value, dotted))
            else:
                flat[dotted] = value
        return flat

    def load_file(self, path: Union[str, Path]) -> bool:
        """
        Load settings from a file

        A file whose YAML content is a mapping is merged directly; otherwise it is
        read as line-oriented "key = value" text.

        Args:
            path: Configuration file path

        Returns:
            bool: True if the file was loaded

        Raises:
            ConfigError: If the file is missing or cannot be parsed
        """
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"Configuration file not found: {path}")

        text = path.read_text()
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError:
            data = None

        try:
            if isinstance(data, dict) and not any('=' in line for line in text.splitlines()
                                                  if line.strip() and not line.lstrip().startswith('#')):
                self.update(data)
            else:
                self.update(self.parser.parse_lines(text))
        except ValueError as e:
            raise ConfigError(f"Invalid configuration file {path}: {e}") from e

        self.source = path
        self.logger.info(f"Configuration loaded from {path}")
        return True

    def save_config(self, path: Union[str, Path]):
        """Write the current settings as YAML"""
        with open(path, 'w') as f:
            yaml.safe_dump(self.config, f, default_flow_style=False, sort_keys=True)
        self.logger.info(f"Configuration saved to {path}")

    def validate_config(self) -> List[str]:
        """
        Check settings for values the library would reject

        Returns:
            list: Error messages, empty when the configuration is valid
        """
        errors = []

        tol = self.get('ode.tol')
        if not isinstance(tol, (int, float)) or not 1e-13 <= tol <= 1e-6:
            errors.append(f"ode.tol must lie in [1e-13, 1e-6], got {tol}")

        w0 = self.get('ode.w0')
        if not isinstance(w0, (int, float)) or not 0 < w0 < 1:
            errors.append(f"ode.w0 must lie in (0, 1), got {w0}")

        fraction = self.get('ode.window_fraction')
        if not isinstance(fraction, (int, float)) or not 0 < fraction <= 1:
            errors.append(f"ode.window_fraction must lie in (0, 1], got {fraction}")

        for key in ('recurrence.n_max', 'recurrence.coalescing_n_max', 'sweep.omega_n_max'):
            value = self.get(key)
            if not isinstance(value, int) or not 10 <= value <= 3000:
                errors.append(f"{key} must be an integer in [10, 3000], got {value}")

        n_points = self.get('sweep.n_points')
        if not isinstance(n_points, int) or n_points < 1:
            errors.append(f"sweep.n_points must be a positive integer, got {n_points}")

        workers = self.get('sweep.workers')
        if not isinstance(workers, int) or workers < 1:
            errors.append(f"sweep.workers must be a positive integer, got {workers}")

        precision = self.get('output.precision')
        if not isinstance(precision, int) or not 1 <= precision <= 17:
            errors.append(f"output.precision must be an integer in [1, 17], got {precision}")

        for key, value in self.section('acceptance').items():
            if not isinstance(value, (int, float)) or value <= 0:
                errors.append(f"acceptance.{key} must be positive, got {value}")

        return errors


def load_config(path: Optional[Union[str, Path]] = None,
                overrides: Optional[Dict[str, Any]] = None) -> ConfigManager:
    """
    Load and validate configuration

    Args:
        path: Optional configuration file (YAML mapping or key = value lines)
        overrides: Optional dotted-key overrides applied last

    Returns:
        ConfigManager: Validated configuration

    Raises:
        ConfigError: If loading or validation fails
    """
    manager = ConfigManager()
    if path is not None:
        manager.load_file(path)
    if overrides:
        manager.update(overrides)

    errors = manager.validate_config()
    if errors:
        for error in errors:
            manager.logger.error(f"Config error: {error}")
        raise ConfigError("; ".join(errors))

    return manager
