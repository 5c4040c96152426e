"""Discrete-event simulator of an 802.11b DCF infrastructure WLAN."""

from .config import ConfigError, ScenarioConfig, parse_config
from .engine import SimulationError
from .metrics import RunMetrics, effective_data_rate, packet_loss_rate, rtt_summary
from .simulation import Simulation, run_scenario

__all__ = [
    "ConfigError", "RunMetrics", "ScenarioConfig", "Simulation", "SimulationError",
    "effective_data_rate", "packet_loss_rate", "parse_config", "rtt_summary", "run_scenario",
]
