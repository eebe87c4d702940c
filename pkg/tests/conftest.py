"""Test configuration for pytest."""

import sys
from pathlib import Path

import pytest

# Add the source directory to the Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

SAMPLES = project_root / "samples"


@pytest.fixture
def samples_dir() -> Path:
    """Directory holding the sample documents."""
    return SAMPLES


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Point every test at a throwaway config file and a fresh config manager."""
    from nwn.config import reset_config_manager

    monkeypatch.setenv("NWN_CONFIG", str(tmp_path / "nwn-config" / "config.yml"))
    monkeypatch.setenv("NWN_COLOR", "0")
    reset_config_manager()
    yield
    reset_config_manager()
