"""Campaign statistics and the cost-benefit layer.

Summaries report the mean, the population standard deviation (divisor N),
and the 95% normal-approximation confidence half-width ``1.96 * std /
sqrt(N)`` for every recorded metric.

The life-cycle cost of one maintenance strategy is

    LCC = c_f_sys * n_f_sys
        + sum_i (cm_cost_i * n_cm_i + pm_cost_i * n_pm_i)
        + c_op * (t_life - t_op_sys)
        + degraded_factor * c_op * t_degraded

Cost avoidance between two strategies run under common random numbers is
the difference of their LCCs, and the return on investment divides that by
the total monitoring investment of the candidate strategy.  Because LCC is
linear in the metrics, the LCC of the mean metrics equals the mean of the
per-iteration LCCs; both views are reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ScenarioConfig, SystemModel
from .simulate import IterationRecord, StrategyConfig

Z_95 = 1.96


@dataclass(frozen=True)
class MetricStats:
    mean: float | np.ndarray
    std: float | np.ndarray
    ci95: float | np.ndarray

    def to_jsonable(self):
        def conv(x):
            return float(x) if np.ndim(x) == 0 else [float(v) for v in x]

        return {"mean": conv(self.mean), "std": conv(self.std), "ci95": conv(self.ci95)}


def _stats(values: np.ndarray, n: int) -> MetricStats:
    mean = values.mean(axis=0)
    std = values.std(axis=0)  # population form, divisor N
    ci = Z_95 * std / np.sqrt(n)
    if np.ndim(mean) == 0:
        return MetricStats(float(mean), float(std), float(ci))
    return MetricStats(mean, std, ci)


@dataclass(frozen=True)
class SummaryStats:
    n_records: int
    t_op_sys: MetricStats
    t_degraded: MetricStats
    n_f_sys: MetricStats
    n_missions_completed: MetricStats
    n_cm: MetricStats
    n_pm: MetricStats
    t_op: MetricStats
    n_f_module: MetricStats

    def to_jsonable(self):
        return {
            "n_records": self.n_records,
            "t_op_sys": self.t_op_sys.to_jsonable(),
            "t_degraded": self.t_degraded.to_jsonable(),
            "n_f_sys": self.n_f_sys.to_jsonable(),
            "n_missions_completed": self.n_missions_completed.to_jsonable(),
            "n_cm": self.n_cm.to_jsonable(),
            "n_pm": self.n_pm.to_jsonable(),
            "t_op": self.t_op.to_jsonable(),
            "n_f_module": self.n_f_module.to_jsonable(),
        }


def summarize(records: list[IterationRecord]) -> SummaryStats:
    """Mean / population std / 95% CI half-width for every recorded metric."""
    if not records:
        raise ValueError("cannot summarize an empty record list")
    n = len(records)
    return SummaryStats(
        n_records=n,
        t_op_sys=_stats(np.array([r.t_op_sys for r in records]), n),
        t_degraded=_stats(np.array([r.t_degraded for r in records]), n),
        n_f_sys=_stats(np.array([r.n_f_sys for r in records], dtype=float), n),
        n_missions_completed=_stats(
            np.array([r.n_missions_completed for r in records], dtype=float), n
        ),
        n_cm=_stats(np.stack([r.n_cm for r in records]).astype(float), n),
        n_pm=_stats(np.stack([r.n_pm for r in records]).astype(float), n),
        t_op=_stats(np.stack([r.t_op for r in records]), n),
        n_f_module=_stats(np.stack([r.n_f_module for r in records]).astype(float), n),
    )


def lifecycle_cost(
    source: SummaryStats | IterationRecord,
    model: SystemModel,
    scenario: ScenarioConfig | None = None,
) -> float:
    """Life-cycle cost of one strategy run, from a summary or a single record."""
    sc = scenario if scenario is not None else model.scenario
    if isinstance(source, SummaryStats):
        n_f = source.n_f_sys.mean
        n_cm = source.n_cm.mean
        n_pm = source.n_pm.mean
        t_op_sys = source.t_op_sys.mean
        t_degraded = source.t_degraded.mean
    else:
        n_f = source.n_f_sys
        n_cm = source.n_cm
        n_pm = source.n_pm
        t_op_sys = source.t_op_sys
        t_degraded = source.t_degraded
    cm_cost = np.array([c.cm_cost for c in model.components])
    pm_cost = np.array([c.pm_cost for c in model.components])
    maintenance = float(np.sum(cm_cost * np.asarray(n_cm) + pm_cost * np.asarray(n_pm)))
    lost = sc.t_life - float(t_op_sys)
    return (
        sc.c_f_sys * float(n_f)
        + maintenance
        + sc.c_op * lost
        + sc.degraded_factor * sc.c_op * float(t_degraded)
    )


def cost_avoidance(lcc_original: float, lcc_new: float) -> float:
    """Cost avoided by the new strategy; negative if it costs more."""
    return lcc_original - lcc_new


def total_investment(strategy: StrategyConfig, model: SystemModel) -> float:
    """Monitoring hardware investment summed over the strategy's components."""
    return float(sum(model.component(cid).cms_investment for cid in strategy.monitored_ids))


def roi(ca: float, strategy: StrategyConfig, model: SystemModel) -> float | None:
    """Return on investment; None when the strategy invests nothing."""
    investment = total_investment(strategy, model)
    if investment <= 0.0:
        return None
    return ca / investment


@dataclass(frozen=True)
class CbaReport:
    """Paired comparison of a candidate strategy against a baseline."""

    n_records: int
    lcc_baseline: float
    lcc_candidate: float
    cost_avoidance: float
    total_investment: float
    roi: float | None
    cost_avoidance_stats: MetricStats
    lcc_baseline_stats: MetricStats
    lcc_candidate_stats: MetricStats
    delta_n_cm: MetricStats
    delta_n_pm: MetricStats
    delta_t_op_sys: MetricStats
    delta_t_degraded: MetricStats
    baseline: SummaryStats
    candidate: SummaryStats

    def to_jsonable(self):
        return {
            "n_records": self.n_records,
            "lcc_baseline": self.lcc_baseline,
            "lcc_candidate": self.lcc_candidate,
            "cost_avoidance": self.cost_avoidance,
            "total_investment": self.total_investment,
            "roi": self.roi,
            "cost_avoidance_stats": self.cost_avoidance_stats.to_jsonable(),
            "lcc_baseline_stats": self.lcc_baseline_stats.to_jsonable(),
            "lcc_candidate_stats": self.lcc_candidate_stats.to_jsonable(),
            "delta_n_cm": self.delta_n_cm.to_jsonable(),
            "delta_n_pm": self.delta_n_pm.to_jsonable(),
            "delta_t_op_sys": self.delta_t_op_sys.to_jsonable(),
            "delta_t_degraded": self.delta_t_degraded.to_jsonable(),
            "baseline": self.baseline.to_jsonable(),
            "candidate": self.candidate.to_jsonable(),
        }


def compare_strategies(
    baseline_records: list[IterationRecord],
    candidate_records: list[IterationRecord],
    model: SystemModel,
    scenario: ScenarioConfig | None = None,
    strategy: StrategyConfig | None = None,
) -> CbaReport:
    """Full cost-benefit report for candidate vs baseline campaigns.

    Both campaigns must come from the same model, scenario, and seed policy
    (common random numbers); per-iteration deltas are then paired, which
    tightens every delta confidence interval.
    """
    if len(baseline_records) != len(candidate_records):
        raise ValueError("campaigns must hold the same number of iterations")
    n = len(baseline_records)
    base = summarize(baseline_records)
    cand = summarize(candidate_records)
    lcc_o = lifecycle_cost(base, model, scenario)
    lcc_n = lifecycle_cost(cand, model, scenario)
    ca = cost_avoidance(lcc_o, lcc_n)
    strat = strategy if strategy is not None else StrategyConfig.none()
    investment = total_investment(strat, model)

    lcc_o_iter = np.array([lifecycle_cost(r, model, scenario) for r in baseline_records])
    lcc_n_iter = np.array([lifecycle_cost(r, model, scenario) for r in candidate_records])

    d_cm = np.stack([c.n_cm - b.n_cm for b, c in zip(baseline_records, candidate_records)])
    d_pm = np.stack([c.n_pm - b.n_pm for b, c in zip(baseline_records, candidate_records)])
    d_top = np.array(
        [c.t_op_sys - b.t_op_sys for b, c in zip(baseline_records, candidate_records)]
    )
    d_td = np.array(
        [c.t_degraded - b.t_degraded for b, c in zip(baseline_records, candidate_records)]
    )

    return CbaReport(
        n_records=n,
        lcc_baseline=lcc_o,
        lcc_candidate=lcc_n,
        cost_avoidance=ca,
        total_investment=investment,
        roi=None if investment <= 0.0 else ca / investment,
        cost_avoidance_stats=_stats(lcc_o_iter - lcc_n_iter, n),
        lcc_baseline_stats=_stats(lcc_o_iter, n),
        lcc_candidate_stats=_stats(lcc_n_iter, n),
        delta_n_cm=_stats(d_cm.astype(float), n),
        delta_n_pm=_stats(d_pm.astype(float), n),
        delta_t_op_sys=_stats(d_top, n),
        delta_t_degraded=_stats(d_td, n),
        baseline=base,
        candidate=cand,
    )


def maintenance_table(
    report: CbaReport, model: SystemModel, min_failures: float | None = None
) -> list[dict]:
    """Per-component CM/PM means with CIs for both strategies (plot data).

    With ``min_failures`` set, only components whose mean CM count exceeds
    it under either strategy are included.
    """
    rows = []
    for i, comp in enumerate(model.components):
        b_cm = float(report.baseline.n_cm.mean[i])
        c_cm = float(report.candidate.n_cm.mean[i])
        if min_failures is not None and max(b_cm, c_cm) <= min_failures:
            continue
        rows.append(
            {
                "component": comp.id,
                "label": comp.label,
                "baseline_cm_mean": b_cm,
                "baseline_cm_ci95": float(report.baseline.n_cm.ci95[i]),
                "baseline_pm_mean": float(report.baseline.n_pm.mean[i]),
                "baseline_pm_ci95": float(report.baseline.n_pm.ci95[i]),
                "candidate_cm_mean": c_cm,
                "candidate_cm_ci95": float(report.candidate.n_cm.ci95[i]),
                "candidate_pm_mean": float(report.candidate.n_pm.mean[i]),
                "candidate_pm_ci95": float(report.candidate.n_pm.ci95[i]),
            }
        )
    return rows
