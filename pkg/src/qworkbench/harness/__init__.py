"""Scenario registry, configuration, run artifacts, and the CLI."""
from .config import ConfigError, ScenarioConfig, load_config
from .artifact import RunArtifact, Table
from .scenarios import (
    InvariantBreach,
    SCENARIOS,
    describe_scenario,
    list_scenarios,
    run_scenario,
)

__all__ = [
    "ConfigError",
    "InvariantBreach",
    "RunArtifact",
    "SCENARIOS",
    "ScenarioConfig",
    "Table",
    "describe_scenario",
    "list_scenarios",
    "load_config",
    "run_scenario",
]
