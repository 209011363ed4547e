"""Bundled unmanned-surface-vessel case study: 71 components, 5 subsystems.

``usv_system.json`` describes the full system (components, fault tree,
scenario constants).  Three monitoring strategies ship with it:

* ``none`` - corrective maintenance only, nothing monitored;
* ``critical`` - every critical component monitored at detection 0.5;
* ``targeted`` - a hand-picked mix of wear-prone critical and redundant
  components monitored at detection 0.5.
"""

from __future__ import annotations

from importlib import resources

from ..model import SystemModel, parse_system
from ..simulate import StrategyConfig

STRATEGY_NAMES = ("none", "critical", "targeted")


def usv_system_path():
    return resources.files(__name__) / "usv_system.json"


def usv_strategy_path(name: str):
    if name not in STRATEGY_NAMES:
        raise ValueError(f"unknown strategy {name!r}; choose from {STRATEGY_NAMES}")
    return resources.files(__name__) / f"usv_strategy_{name}.json"


def load_usv_model() -> SystemModel:
    return parse_system(usv_system_path().read_bytes())


def load_usv_strategy(name: str) -> StrategyConfig:
    return StrategyConfig.from_json(usv_strategy_path(name).read_bytes())
