"""Simulation library for magnetoelectric antiferromagnetic memory (ME-AFMRAM).

Modules: ``physics`` (domain-wall kinetics), ``cell`` (behavioural cell
circuit), ``hall`` (anomalous-Hall read-out), ``array_model`` (organization
and latency), ``crypto`` (memory encryption), ``llg``/``attacks``/
``sidechannel`` (attack harness), ``config``/``presets``/``cli``.
"""

from .config import DEFAULT_SEED, SimConfig, load_config
from .errors import (AnalysisError, ConfigError, CounterOverflow, RegimeError,
                     ResolutionError, WriteBlocked)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SEED", "SimConfig", "load_config", "AnalysisError", "ConfigError",
    "CounterOverflow", "RegimeError", "ResolutionError", "WriteBlocked", "__version__",
]
