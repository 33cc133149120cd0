"""
Config Module
Experiment configuration: defaults, INI file parsing and CLI overrides

Precedence is CLI flag > config file > MOMENTLAB_CACHE_DIR > built-in default.
"""

import configparser
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

from utils.errors import ConfigError

logger = logging.getLogger(__name__)

CODE_VERSION = "1.0.0"
# Bump whenever L-value numerics change; cached records of older versions are ignored.
ACCURACY_VERSION = 1

CACHE_DIR_ENV = "MOMENTLAB_CACHE_DIR"
DEFAULT_CACHE_DIR = "./cache"

FAMILIES = ("primitive", "all_moduli")

DEFAULT_X_VALUES = [1000.0, 2000.0, 4000.0, 8000.0]
DEFAULT_L_VALUES = [1, 3, 5, 15]
DEFAULT_ALPHAS = [0j, 0.1 + 0j, 0.02 + 0.5j]

# Records above this are refused by the moment computations
LVALUE_ADMISSION_ERROR = 1e-9
AFE_CUTOFF_CONSTANT = 3.2


def default_cache_dir() -> str:
    return os.environ.get(CACHE_DIR_ENV) or DEFAULT_CACHE_DIR


def parse_complex(text: str) -> complex:
    """
    Parse a shift such as "0", "0.1" or "0.02+0.5j"

    Args:
        text (str): Value as written in a config file or on the command line

    Returns:
        complex: Parsed value
    """
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError as e:
        raise ConfigError(f"Invalid complex value {text!r}: {e}")


def _split(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


@dataclass
class ExperimentConfig:
    """Everything run_experiment needs to know"""

    family: str = "primitive"
    x_values: List[float] = field(default_factory=lambda: list(DEFAULT_X_VALUES))
    l_values: List[int] = field(default_factory=lambda: list(DEFAULT_L_VALUES))
    alphas: List[complex] = field(default_factory=lambda: list(DEFAULT_ALPHAS))
    weight: str = "bump"
    threads: int = 1
    cache_dir: str = field(default_factory=default_cache_dir)
    out: str = "reports/moments"
    afe_cutoff_constant: float = AFE_CUTOFF_CONSTANT
    lvalue_admission_error: float = LVALUE_ADMISSION_ERROR

    def validate(self) -> "ExperimentConfig":
        if self.family not in FAMILIES:
            raise ConfigError(f"Unknown family {self.family!r}, expected one of {FAMILIES}")
        if self.threads < 1:
            raise ConfigError(f"threads must be at least 1, got {self.threads}")
        if any(x <= 0 for x in self.x_values):
            raise ConfigError("every X must be positive")
        if any(l < 1 or l % 2 == 0 for l in self.l_values):
            raise ConfigError("every l must be a positive odd integer")
        if self.afe_cutoff_constant <= 0:
            raise ConfigError(f"afe_cutoff_constant must be positive, got {self.afe_cutoff_constant}")
        if self.lvalue_admission_error <= 0:
            raise ConfigError(
                f"lvalue_admission_error must be positive, got {self.lvalue_admission_error}")
        return self

    def with_overrides(self, overrides: Dict[str, object]) -> "ExperimentConfig":
        """
        Apply CLI flags on top of this config; None values are ignored

        Args:
            overrides (Dict[str, object]): Field name to value

        Returns:
            ExperimentConfig: New config
        """
        changes = {key: value for key, value in overrides.items() if value is not None}
        unknown = set(changes) - set(self.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"Unknown config keys: {sorted(unknown)}")
        return replace(self, **changes).validate()


def load_config(path: Optional[str] = None) -> ExperimentConfig:
    """
    Load an experiment config from an INI-style file

    Sections are [experiment], [runtime] and [accuracy]; missing keys keep
    their defaults.

    Args:
        path (Optional[str]): Config file path, or None for defaults

    Returns:
        ExperimentConfig: Parsed and validated config
    """
    config = ExperimentConfig()
    if path is None:
        return config.validate()

    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            parser.read_file(handle)
    except (OSError, configparser.Error) as e:
        raise ConfigError(f"Error reading config {path}: {e}")

    changes: Dict[str, object] = {}
    try:
        if parser.has_section("experiment"):
            section = parser["experiment"]
            if "family" in section:
                changes["family"] = section["family"].strip()
            if "X" in section:
                changes["x_values"] = [float(v) for v in _split(section["X"])]
            if "l" in section:
                changes["l_values"] = [int(v) for v in _split(section["l"])]
            if "alpha" in section:
                changes["alphas"] = [parse_complex(v) for v in _split(section["alpha"])]
            if "weight" in section:
                changes["weight"] = section["weight"].strip()
        if parser.has_section("runtime"):
            section = parser["runtime"]
            if "threads" in section:
                changes["threads"] = section.getint("threads")
            if "cache_dir" in section:
                changes["cache_dir"] = section["cache_dir"].strip()
            if "out" in section:
                changes["out"] = section["out"].strip()
        if parser.has_section("accuracy"):
            section = parser["accuracy"]
            if "afe_cutoff_constant" in section:
                changes["afe_cutoff_constant"] = section.getfloat("afe_cutoff_constant")
            if "lvalue_admission_error" in section:
                changes["lvalue_admission_error"] = section.getfloat("lvalue_admission_error")
    except ValueError as e:
        raise ConfigError(f"Invalid value in config {path}: {e}")

    logger.info("Loaded config %s (%d keys set)", path, len(changes))
    return replace(config, **changes).validate()
