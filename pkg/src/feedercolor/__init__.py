"""Interference-aware subchannel allocation for LEO feeder links with multi-antenna gateways."""
from .pipeline import RunOptions, RunReport, SlotMetrics, run_simulation
from .scenario import ConfigError, ScenarioConfig, load_scenario, sample_scenario_path

__all__ = [
    "ConfigError",
    "RunOptions",
    "RunReport",
    "ScenarioConfig",
    "SlotMetrics",
    "load_scenario",
    "run_simulation",
    "sample_scenario_path",
]
__version__ = "0.1.0"
