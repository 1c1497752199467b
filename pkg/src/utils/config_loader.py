import logging
import os
from typing import Dict, List, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError, validator

from src.utils.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULTS = {
    "presets_dir": "data/presets",
    "subgroups_dir": "data/subgroups",
    "output_dir": "output",
    "cache_dir": None,
    "enumeration_cap": 10**8,
    "entry_bound": 10,
    "hodge_max_rank": 6,
    "threads": 0,
    "max_candidates": 400,
    "max_primes": 4,
    "max_rounds": 12,
    "dedup_theta_norm": 2,
    "random_seed": 20240601,
    "neighbor_primes": [],
    "short_vector_norm": 12,
    "short_vector_share": 0.5,
    "mass_retry_limit": 4,
}


class PipelineSettings(BaseModel):
    """Validated run settings shared by the library entry points and the CLI."""

    presets_dir: str = DEFAULTS["presets_dir"]
    subgroups_dir: str = DEFAULTS["subgroups_dir"]
    output_dir: str = DEFAULTS["output_dir"]
    cache_dir: Optional[str] = None
    enumeration_cap: int = DEFAULTS["enumeration_cap"]
    entry_bound: int = DEFAULTS["entry_bound"]
    hodge_max_rank: int = DEFAULTS["hodge_max_rank"]
    threads: int = DEFAULTS["threads"]
    max_candidates: int = DEFAULTS["max_candidates"]
    max_primes: int = DEFAULTS["max_primes"]
    max_rounds: int = DEFAULTS["max_rounds"]
    dedup_theta_norm: int = DEFAULTS["dedup_theta_norm"]
    random_seed: int = DEFAULTS["random_seed"]
    neighbor_primes: List[int] = []
    short_vector_norm: int = DEFAULTS["short_vector_norm"]
    short_vector_share: float = DEFAULTS["short_vector_share"]
    mass_retry_limit: int = DEFAULTS["mass_retry_limit"]

    class Config:
        allow_mutation = False

    @validator("enumeration_cap", "entry_bound", "max_candidates", "max_primes", "max_rounds", "hodge_max_rank")
    def _positive(cls, value):
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @validator("threads")
    def _threads(cls, value):
        if value < 0:
            raise ValueError("must be zero (all cores) or positive")
        return value

    @validator("dedup_theta_norm", "short_vector_norm")
    def _even_norm(cls, value):
        if value < 2 or value % 2:
            raise ValueError("must be an even integer >= 2")
        return value

    @validator("short_vector_share")
    def _share(cls, value):
        if not 0 <= value <= 1:
            raise ValueError("must lie in [0, 1]")
        return value

    @property
    def n_jobs(self) -> int:
        """Worker count in joblib convention (-1 means all cores)."""
        return -1 if self.threads == 0 else self.threads


def _read_yaml(config_path: str) -> Dict:
    try:
        with open(config_path, "r") as f:
            return yaml.safe_load(f) or {}
    except FileNotFoundError:
        logger.warning(f"Config file {config_path} not found, using default values")
        return {}


def load_config(config_path: str = "config.yaml", pipeline_config_path: str = "config/pipeline_config.yaml") -> dict:
    """Load configuration from YAML files, with defaults for missing keys.

    Environment overrides (read through python-dotenv): K3F_CACHE_DIR, K3F_THREADS.
    """
    load_dotenv()
    config = dict(DEFAULTS)
    for path in (config_path, pipeline_config_path):
        loaded = _read_yaml(path)
        config.update({key: value for key, value in loaded.items() if key in DEFAULTS})
    if os.getenv("K3F_CACHE_DIR"):
        config["cache_dir"] = os.getenv("K3F_CACHE_DIR")
    if os.getenv("K3F_THREADS"):
        config["threads"] = os.getenv("K3F_THREADS")
    return config


def load_settings(config_path: str = "config.yaml", overrides: Optional[Dict] = None) -> PipelineSettings:
    """Load and validate settings; CLI overrides win over files and environment."""
    config = load_config(config_path)
    if overrides:
        config.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return PipelineSettings(**config)
    except ValidationError as e:
        raise ConfigurationError(f"invalid configuration: {e}") from e
