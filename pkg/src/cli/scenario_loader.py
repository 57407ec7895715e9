"""
Scenario files: flat key=value text, one key per line, '#' comments allowed.

    a=1
    b=0.5
    n=1.2
    rho0=1
    zeta0=pi/2
    span=2pi
"""

import hashlib
import io
from pathlib import Path

from dotenv import dotenv_values
from pydantic import ValidationError

from src.core.exceptions import ScenarioError
from src.shared.logger import get_logger
from src.shared.models import Scenario

logger = get_logger(__name__)


def parse_scenario_text(text: str, source: str = "<text>") -> Scenario:
    values = dotenv_values(stream=io.StringIO(text), interpolate=False)
    empty = sorted(k for k, v in values.items() if v is None or v.strip() == "")
    if empty:
        raise ScenarioError(f"{source}: keys without a value: {', '.join(empty)}")
    try:
        return Scenario.model_validate(values)
    except ValidationError as e:
        raise ScenarioError(f"{source}: invalid scenario: {e}", original_error=e) from e


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file {path}: {e}", original_error=e) from e
    scenario = parse_scenario_text(text, source=str(path))
    logger.debug(f"Loaded scenario {path} (digest {scenario_digest(scenario)[:12]})")
    return scenario


def canonicalize(scenario: Scenario) -> str:
    """Sorted key=value lines with repr floats; parsing the result gives back an equal Scenario."""
    lines = []
    for key, value in sorted(scenario.model_dump(exclude_none=True).items()):
        rendered = repr(float(value)) if isinstance(value, int | float) else str(value)
        lines.append(f"{key}={rendered}")
    return "\n".join(lines) + "\n"


def scenario_digest(scenario: Scenario) -> str:
    return hashlib.sha256(canonicalize(scenario).encode("utf-8")).hexdigest()
