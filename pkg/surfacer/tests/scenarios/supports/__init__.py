"""Scenario testing support subpackage."""
from .running import ScenarioRunner  # noqa: F401
