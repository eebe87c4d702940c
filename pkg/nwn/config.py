"""Configuration management for nwn."""

import os
import yaml
from pathlib import Path
from typing import Any, Dict, Optional
import logging

from .explore import Limits


logger = logging.getLogger(__name__)

LIMIT_KEYS = ("max_depth", "max_states", "max_tokens", "max_modes", "budget_ms")


class ConfigError(Exception):
    """Raised when there's an error with configuration."""
    pass


def default_config_path() -> Path:
    """The config file: ``$NWN_CONFIG`` if set, else ``~/.config/nwn/config.yml``."""
    override = os.environ.get("NWN_CONFIG")
    if override:
        return Path(override).expanduser()
    return Path.home() / ".config" / "nwn" / "config.yml"


class ConfigManager:
    """Manages nwn search limits, cross-check sizes and output preferences."""

    def __init__(self, config_file: Optional[Path] = None):
        self.config_file = Path(config_file) if config_file else default_config_path()
        self.config_dir = self.config_file.parent
        self._config: Optional[Dict[str, Any]] = None
        self._ensure_config_exists()

    def _get_default_config(self) -> Dict[str, Any]:
        """Return the default configuration structure."""
        return {
            "limits": {
                "max_depth": 64,
                "max_states": 200000,
                "max_tokens": 64,
                "max_modes": 1000000,
                "budget_ms": 60000,
            },
            "crosscheck": {
                "samples": 8,
                "targets": 4,
                "exhaustive_loss": False,
            },
            "output": {
                "color": True,
                "json_indent": 2,
            },
        }

    def _ensure_config_exists(self):
        """Ensure the configuration directory and file exist."""
        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)
            if not self.config_file.exists():
                logger.info(f"Creating default config at {self.config_file}")
                self._save_config(self._get_default_config())
        except ConfigError:
            raise
        except Exception as e:
            raise ConfigError(f"Failed to create config directory: {e}")

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from file, filling in missing sections with defaults."""
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                loaded = yaml.safe_load(f) or {}
        except FileNotFoundError:
            logger.warning(f"Config file not found: {self.config_file}")
            return self._get_default_config()
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in config file: {e}")
        except Exception as e:
            raise ConfigError(f"Failed to load config: {e}")
        if not isinstance(loaded, dict):
            raise ConfigError(f"Config file {self.config_file} must hold a mapping")
        config = self._get_default_config()
        for section, values in loaded.items():
            if isinstance(values, dict) and isinstance(config.get(section), dict):
                config[section].update(values)
            else:
                config[section] = values
        return config

    def _save_config(self, config: Dict[str, Any]):
        """Save configuration to file."""
        try:
            with open(self.config_file, 'w', encoding='utf-8') as f:
                yaml.dump(config, f, default_flow_style=False, sort_keys=False)
        except Exception as e:
            raise ConfigError(f"Failed to save config: {e}")

    @property
    def config(self) -> Dict[str, Any]:
        """Get the current configuration, loading if necessary."""
        if self._config is None:
            self._config = self._load_config()
        return self._config

    def get(self, section: str, key: str, default: Any = None) -> Any:
        return self.config.get(section, {}).get(key, default)

    def set(self, section: str, key: str, value: Any):
        """Persist a single setting."""
        config = {name: dict(values) if isinstance(values, dict) else values
                  for name, values in self.config.items()}
        config.setdefault(section, {})[key] = value
        self._save_config(config)
        self._config = config
        logger.info(f"Set {section}.{key} to {value!r}")

    def get_limits(self, **overrides: Optional[int]) -> Limits:
        """Search limits from the file, with non-``None`` overrides applied.

        Raises:
            ConfigError: If a limit is not a positive integer.
        """
        values = {key: self.get("limits", key) for key in LIMIT_KEYS}
        values["jobs"] = 1
        values.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return Limits(**values)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid limits: {e}")

    def crosscheck_options(self) -> Dict[str, Any]:
        return {
            "samples": int(self.get("crosscheck", "samples", 8)),
            "targets": int(self.get("crosscheck", "targets", 4)),
            "exhaustive_loss": bool(self.get("crosscheck", "exhaustive_loss", False)),
        }

    def use_color(self) -> bool:
        if os.environ.get("NWN_COLOR") == "0":
            return False
        return bool(self.get("output", "color", True))

    def json_indent(self) -> int:
        return int(self.get("output", "json_indent", 2))


_config_manager: Optional[ConfigManager] = None


def get_config_manager() -> ConfigManager:
    """The shared config manager, created on first use."""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def reset_config_manager():
    """Forget the shared manager so the next call re-reads ``NWN_CONFIG``."""
    global _config_manager
    _config_manager = None


def get_limits(**overrides: Optional[int]) -> Limits:
    return get_config_manager().get_limits(**overrides)
