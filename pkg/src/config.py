"""Configuration management for the RALS benchmark toolkit.

Configuration Tiers:
    Tier 1: .env / environment - Solver and bench defaults (prefix RALSBENCH_)
    Tier 2: This file (config.py) - Sensible defaults (override via .env)
    Tier 3: config/ralsbench_settings.yaml - Diagnostics thresholds and schedules (optional)
"""

import logging
import threading
from pathlib import Path
from typing import Any, Dict, List

import yaml
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


# =============================================================================
# TIER 2: Default Settings (can be overridden via .env)
# =============================================================================

class Settings(BaseSettings):
    """Application settings with sensible defaults.

    Every field can be overridden with a RALSBENCH_<FIELD> environment
    variable or an entry in the .env file.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="RALSBENCH_",
        case_sensitive=False,
        extra="ignore",
    )

    # -------------------------------------------------------------------------
    # Project Identity
    # -------------------------------------------------------------------------
    project_name: str = "ralsbench"
    environment: str = "development"

    # -------------------------------------------------------------------------
    # Solver Defaults
    # -------------------------------------------------------------------------
    tol: float = 1e-12              # stop when ||X(n) - X(n-1)||_F^2 < tol
    max_iter: int = 50000
    lambda0: float = 1.0            # proximal weight for rals / rals-a
    accel_alpha: float = 1e-6       # acceleration gate: err must be below this
    accel_q: int = 100              # acceleration interval
    pinv_threshold: float = 1e-12   # relative singular value cutoff
    accel_safeguard: bool = True    # keep an accelerated step only if f ends no higher than the plain sweep

    # -------------------------------------------------------------------------
    # Bench Defaults
    # -------------------------------------------------------------------------
    trials: int = 20
    output_dir: str = "data/results"
    workers: int = 1

    # -------------------------------------------------------------------------
    # Logging
    # -------------------------------------------------------------------------
    log_level: str = "INFO"
    log_file: str = ""

    @property
    def base_dir(self) -> Path:
        """Get base directory."""
        return Path(__file__).parent.parent


# =============================================================================
# TIER 3: Advanced Settings (from config/ralsbench_settings.yaml)
# =============================================================================

class BenchSettings:
    """Advanced settings loaded from YAML.

    These settings are for users who want to tune:
    - The decreasing regularization schedule of rals-l / rals-al
    - Diagnostics thresholds (plateaus, rate windows, Hessian steps)
    - Swamp problem generation
    - Timing behaviour

    If the YAML file doesn't exist, the defaults below are used.
    """

    DEFAULTS = {
        # Decreasing-lambda schedule shared by rals-l and rals-al
        "decreasing_schedule": {
            "kind": "geometric",
            "lambda0": 1.0,
            "gamma": 0.99,
            "lambda_min": 1e-8,
        },

        "diagnostics": {
            "plateau_ratio": 0.999,        # err_sq(n)/err_sq(n-1) at or above this is stagnation
            "plateau_min_len": 50,
            "rate_window_fraction": 0.5,
            "rate_min_records": 10,
            "gradient_ratio_factor": 10.0,
            "hessian_fd_step": 1e-6,
            "null_space_tol": 1e-6,
            "displacement_floor": 1e-10,
        },

        "problems": {
            "swamp_collinearity": 0.99,
        },

        "timing": {
            "warmup_max_iter": 5,
            "min_trials_for_median": 3,
        },

        # Column order of the timing table
        "algorithm_order": ["als", "als-a", "rals", "rals-a", "rals-l", "rals-al"],
    }

    def __init__(self, config_path: str = "config/ralsbench_settings.yaml"):
        """Initialize bench settings.

        Args:
            config_path: Path to the YAML configuration file
        """
        self.config_path = Path(config_path)
        self._config: Dict[str, Any] = {}
        self._loaded = False
        self._lock = threading.Lock()

    def _load(self) -> None:
        """Load configuration from YAML file (once, safe from worker threads)."""
        if self._loaded:
            return

        with self._lock:
            if self._loaded:
                return
            config = self._deep_copy(self.DEFAULTS)

            if self.config_path.exists():
                try:
                    with open(self.config_path, 'r', encoding='utf-8') as f:
                        yaml_config = yaml.safe_load(f) or {}
                    self._deep_merge(config, yaml_config)
                except (OSError, yaml.YAMLError) as e:
                    logger.warning("Error loading %s: %s; using default settings", self.config_path, e)

            self._config = config
            self._loaded = True

    def _deep_copy(self, obj: Any) -> Any:
        """Create a deep copy of nested dicts/lists."""
        if isinstance(obj, dict):
            return {k: self._deep_copy(v) for k, v in obj.items()}
        elif isinstance(obj, list):
            return [self._deep_copy(item) for item in obj]
        return obj

    def _deep_merge(self, base: dict, override: dict) -> None:
        """Recursively merge override into base."""
        for key, value in override.items():
            if key in base and isinstance(base[key], dict) and isinstance(value, dict):
                self._deep_merge(base[key], value)
            else:
                base[key] = value

    def get(self, *keys: str, default: Any = None) -> Any:
        """Get a nested configuration value.

        Args:
            *keys: Path to the configuration value (e.g., "diagnostics", "plateau_ratio")
            default: Default value if not found

        Returns:
            The configuration value or default
        """
        self._load()

        value = self._config
        for key in keys:
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return value

    @property
    def decreasing_schedule(self) -> dict:
        """Get the rals-l / rals-al schedule parameters."""
        return self.get("decreasing_schedule", default=self.DEFAULTS["decreasing_schedule"])

    @property
    def diagnostics(self) -> dict:
        """Get diagnostics thresholds."""
        return self.get("diagnostics", default=self.DEFAULTS["diagnostics"])

    @property
    def timing(self) -> dict:
        """Get timing options."""
        return self.get("timing", default=self.DEFAULTS["timing"])

    @property
    def algorithm_order(self) -> List[str]:
        """Get the canonical algorithm column order."""
        return self.get("algorithm_order", default=self.DEFAULTS["algorithm_order"])

    @property
    def swamp_collinearity(self) -> float:
        """Get the default pairwise |cos| of swamp generating columns."""
        return float(self.get("problems", "swamp_collinearity",
                              default=self.DEFAULTS["problems"]["swamp_collinearity"]))

    def diagnostic(self, name: str) -> Any:
        """Get a single diagnostics threshold by name."""
        return self.get("diagnostics", name, default=self.DEFAULTS["diagnostics"][name])


# =============================================================================
# Global Instances
# =============================================================================

# Tier 2: Environment-based settings
settings = Settings()

# Tier 3: Advanced YAML-based settings
bench_settings = BenchSettings(str(settings.base_dir / "config" / "ralsbench_settings.yaml"))
