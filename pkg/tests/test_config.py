"""Tests for nwn configuration management."""

import os
import tempfile
from pathlib import Path
from unittest.mock import patch

import pytest
import yaml

from nwn.config import ConfigError, ConfigManager, get_config_manager, get_limits, reset_config_manager
from nwn.explore import Limits


class TestConfigManager:
    """Test the configuration management system."""

    def setup_method(self):
        """Set up test environment."""
        self.temp_dir = tempfile.mkdtemp()
        self.config_dir = Path(self.temp_dir) / ".config" / "nwn"
        self.config_file = self.config_dir / "config.yml"

    def test_default_config_creation(self, monkeypatch):
        """The default file lands under the home directory."""
        monkeypatch.delenv("NWN_CONFIG")
        with patch('pathlib.Path.home', return_value=Path(self.temp_dir)):
            ConfigManager()

            assert self.config_file.exists()

            with open(self.config_file, 'r') as f:
                config = yaml.safe_load(f)

            assert 'limits' in config
            assert 'crosscheck' in config
            assert 'output' in config

    def test_env_override(self):
        manager = ConfigManager()
        assert manager.config_file == Path(os.environ["NWN_CONFIG"])
        assert manager.config_file.exists()

    def test_default_limits(self):
        limits = ConfigManager(self.config_file).get_limits()
        assert limits == Limits()

    def test_overrides_win(self):
        limits = ConfigManager(self.config_file).get_limits(max_depth=5, max_states=None)
        assert limits.max_depth == 5
        assert limits.max_states == 200000

    def test_partial_file_keeps_defaults(self):
        self.config_dir.mkdir(parents=True)
        self.config_file.write_text("limits:\n  max_tokens: 9\n")
        manager = ConfigManager(self.config_file)
        assert manager.get_limits().max_tokens == 9
        assert manager.crosscheck_options()["samples"] == 8

    def test_invalid_limit(self):
        self.config_dir.mkdir(parents=True)
        self.config_file.write_text("limits:\n  max_depth: -1\n")
        with pytest.raises(ConfigError):
            ConfigManager(self.config_file).get_limits()

    def test_invalid_yaml(self):
        self.config_dir.mkdir(parents=True)
        self.config_file.write_text("limits: [unclosed\n")
        with pytest.raises(ConfigError):
            ConfigManager(self.config_file).config

    def test_not_a_mapping(self):
        self.config_dir.mkdir(parents=True)
        self.config_file.write_text("- just\n- a list\n")
        with pytest.raises(ConfigError):
            ConfigManager(self.config_file).config

    def test_set_persists(self):
        manager = ConfigManager(self.config_file)
        manager.set("crosscheck", "samples", 3)
        assert ConfigManager(self.config_file).crosscheck_options()["samples"] == 3

    def test_save_failure(self):
        manager = ConfigManager(self.config_file)
        with patch('builtins.open', side_effect=PermissionError("read-only")):
            with pytest.raises(ConfigError):
                manager.set("output", "color", False)

    def test_color_switch(self, monkeypatch):
        manager = ConfigManager(self.config_file)
        assert not manager.use_color()
        monkeypatch.delenv("NWN_COLOR")
        assert manager.use_color()
        assert manager.json_indent() == 2


class TestSharedManager:
    """The module-level manager follows NWN_CONFIG."""

    def test_reset_rereads_environment(self, tmp_path, monkeypatch):
        first = get_config_manager()
        assert get_config_manager() is first
        monkeypatch.setenv("NWN_CONFIG", str(tmp_path / "other" / "config.yml"))
        reset_config_manager()
        assert get_config_manager().config_file == tmp_path / "other" / "config.yml"

    def test_module_level_limits(self):
        assert get_limits(max_depth=2).max_depth == 2
