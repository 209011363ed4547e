"""Mission-based maintenance lifetime simulation and cost-benefit analysis.

The package simulates a multi-component unmanned system performing
back-to-back missions over its operating life, with failures propagating
through a dynamic fault tree (OR / AND / VOTING / SPARE / FDEP gates),
minimal repairs, replacements, and optional condition-based maintenance.
Campaign statistics feed a cost-benefit layer that ranks monitoring
strategies by cost avoidance and return on investment.
"""

from .analysis import (
    CbaReport,
    MetricStats,
    SummaryStats,
    compare_strategies,
    cost_avoidance,
    lifecycle_cost,
    maintenance_table,
    roi,
    summarize,
    total_investment,
)
from .model import (
    AndGate,
    Basic,
    ComponentSpec,
    FdepGate,
    ModelError,
    OrGate,
    ScenarioConfig,
    SpareGate,
    SystemModel,
    ValidationReport,
    Violation,
    VotingGate,
    load_system,
    parse_system,
    serialize_system,
    validate,
)
from .modules import DecompositionError, ModuleDef, critical_ids, decompose
from .sampling import (
    cms_detects,
    sample_conditional_interarrival,
    sample_first_interarrival,
    weibull_cdf,
)
from .simulate import (
    IterationRecord,
    StrategyConfig,
    load_strategy,
    run_campaign,
    run_iteration,
)
from .streams import RngStream, StreamBatch

__version__ = "0.1.0"

__all__ = [
    "AndGate",
    "Basic",
    "CbaReport",
    "ComponentSpec",
    "DecompositionError",
    "FdepGate",
    "IterationRecord",
    "MetricStats",
    "ModelError",
    "ModuleDef",
    "OrGate",
    "RngStream",
    "ScenarioConfig",
    "SpareGate",
    "StrategyConfig",
    "StreamBatch",
    "SummaryStats",
    "SystemModel",
    "ValidationReport",
    "Violation",
    "VotingGate",
    "cms_detects",
    "compare_strategies",
    "cost_avoidance",
    "critical_ids",
    "decompose",
    "lifecycle_cost",
    "load_strategy",
    "load_system",
    "maintenance_table",
    "parse_system",
    "roi",
    "run_campaign",
    "run_iteration",
    "sample_conditional_interarrival",
    "sample_first_interarrival",
    "serialize_system",
    "summarize",
    "total_investment",
    "validate",
    "weibull_cdf",
]
