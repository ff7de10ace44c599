"""chainsim: discrete-event supply chain inventory simulator."""

from .config import ConfigError, ScenarioConfig
from .des import Engine, Entity, RunReport
from .experiments import (
    ScenarioResult,
    full_factorial,
    mspe_run_length,
    replicate,
    run_scenario,
    run_sweep,
)
from .network import Network, build_network, fill_rate_orders, fill_rate_quantity
from .streams import RngStream, StreamHub

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "Engine",
    "Entity",
    "Network",
    "RngStream",
    "RunReport",
    "ScenarioConfig",
    "ScenarioResult",
    "StreamHub",
    "build_network",
    "fill_rate_orders",
    "fill_rate_quantity",
    "full_factorial",
    "mspe_run_length",
    "replicate",
    "run_scenario",
    "run_sweep",
]
