import json
from pathlib import Path

from . import _core
from ._core import (
    ConfigError,
    InfeasibleDesign,
    IsodampError,
    SimulationDiverged,
    alpha_from_order,
    is_hurwitz,
    marginal_gain,
    order_from_alpha,
    overshoot_pct,
    peak_frequency,
    realize,
    step_response,
)

__all__ = [
    "ConfigError",
    "InfeasibleDesign",
    "IsodampError",
    "SimulationDiverged",
    "alpha_from_order",
    "analyze",
    "design",
    "is_hurwitz",
    "load_config",
    "marginal_gain",
    "order_from_alpha",
    "overshoot_pct",
    "peak_frequency",
    "realize",
    "simulate",
    "step_response",
]


def _text(config):
    if isinstance(config, (str, Path)) and Path(config).is_file():
        return Path(config).read_text()
    if isinstance(config, dict):
        return json.dumps(config)
    return str(config)


def load_config(path):
    return json.loads(Path(path).read_text())


def analyze(config):
    return json.loads(_core.analyze(_text(config)))


def design(config):
    return json.loads(_core.design(_text(config)))


def simulate(config):
    return json.loads(_core.simulate(_text(config)))
