"""Scenario runner, claim catalogue and command line interface."""

from .catalogue import CATALOGUE, verify_paper
from .config import ConfigError, ScenarioConfig, config_from_dict, load_config
from .runner import ComparisonReport, compare_systems, run_scenario

__all__ = [
    "CATALOGUE",
    "ComparisonReport",
    "ConfigError",
    "ScenarioConfig",
    "compare_systems",
    "config_from_dict",
    "load_config",
    "run_scenario",
    "verify_paper",
]
