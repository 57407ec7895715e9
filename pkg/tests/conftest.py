import math
import os
import sys
from pathlib import Path

import pytest

# Add project root to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.shared.config import settings
from src.shared.models import EllipseGeometry, Scenario


@pytest.fixture(autouse=True)
def mock_settings(monkeypatch, tmp_path):
    """
    Keep test runs away from the developer's .env and output directory.
    """
    monkeypatch.setenv("LOG_LEVEL", "DEBUG")
    monkeypatch.setenv("LOG_FORMAT", "text")
    monkeypatch.setenv("PURSUIT_OUTPUT_DIR", str(tmp_path / "runs"))
    # the settings singleton is built at import time, so patch the instance as well
    monkeypatch.setattr(settings, "OUTPUT_DIR", str(tmp_path / "runs"))


@pytest.fixture
def circle() -> EllipseGeometry:
    return EllipseGeometry(a=1.0, b=1.0)


@pytest.fixture
def ellipse() -> EllipseGeometry:
    return EllipseGeometry(a=1.0, b=0.5)


def make_scenario(a: float, b: float, n: float, span: float, **overrides) -> Scenario:
    """Canonical start: rho(phi0) = 1, zeta(phi0) = pi/2 at phi0 = pi/2."""
    values = {"a": a, "b": b, "n": n, "phi0": math.pi / 2, "rho0": 1.0, "zeta0": math.pi / 2, "span": span}
    return Scenario(**(values | overrides))


@pytest.fixture
def scenario_factory():
    return make_scenario


@pytest.fixture
def write_scenario(tmp_path):
    """Writes key=value lines to a scenario file and returns its path."""

    def _write(name: str, **values) -> Path:
        path = tmp_path / f"{name}.env"
        path.write_text("".join(f"{k}={v}\n" for k, v in values.items()), encoding="utf-8")
        return path

    return _write
