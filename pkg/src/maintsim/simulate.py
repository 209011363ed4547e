"""Lifetime simulation engine: the mission loop and the iteration loop.

One *iteration* simulates a single system attempting ``n_missions``
back-to-back missions of ``t_m`` hours over its operating life.  Between
missions the system is in port: failed components receive corrective
maintenance (CM), monitored components whose condition points at a failure
on the coming mission may receive preventive maintenance (PM), and the
next mission starts on schedule whether or not the previous one failed.
No maintenance happens at sea.

Within a mission the flow is:

1. *CBM assessment* - every monitored component with accumulated operating
   time is checked against its pending failure interarrival; a detected
   pending failure (probability ``p_cms``) is repaired preventively and a
   fresh interarrival is drawn conditioned on the component's repair age.
2. *Mission attempt* - starting components fail the mission when
   ``t_m + t_op >= t_fail``; dormant spares age at their dormancy factor
   and fail when ``q * t_m + t_op >= t_fail``.
3. *Module assessment* - each module subtree is evaluated dynamically:
   OR fails at the earliest child failure, AND at the latest (and only if
   all children failed), VOTING(k) at the k-th earliest, FDEP at the
   earliest failure among trigger and dependents, and SPARE only if the
   primary failed and no spare can cover the remaining mission time
   (spares activate in declared order).  The system fails at the earliest
   module failure time; that module alone is charged with the failure,
   ties going to the lowest module index.
4. *Failure verification* - components whose computed failure time falls
   after the system failure are restored to working (their failure never
   happened); spare activations after the system failure are undone.
5. *Settlement* - operating hours, degraded hours (from the earliest
   component failure that did not itself end the mission), repair ages,
   and CM/PM/repair counters are updated.  A component that exceeds its
   minimal-repair budget is replaced, resetting its repair age.

Random draws are consumed in a fixed documented order so that reruns are
reproducible and independent of batching: at iteration start, one draw per
component in ascending id order; per mission, one draw per monitored
component with a pending failure (ascending id), then one draw per
detected component for its new interarrival (ascending id), then one draw
per failed component after repairs (ascending id).

The engine is vectorised over a batch of iterations: all state arrays have
shape ``(batch, n_components)`` and rows never interact, so per-iteration
results are independent of batch size and worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import (
    Basic,
    AndGate,
    FdepGate,
    Node,
    OrGate,
    ROLE_STARTING,
    ScenarioConfig,
    SpareGate,
    SystemModel,
    VotingGate,
)
from .modules import ModuleDef, decompose
from .sampling import sample_conditional_interarrival, sample_first_interarrival
from .streams import RngStream, StreamBatch


@dataclass(frozen=True)
class StrategyConfig:
    """Which components carry a condition monitoring system, and how good it is.

    ``detection`` maps component id to the CMS detection probability.
    Components not listed are unmonitored (detection probability 0).
    """

    detection: tuple[tuple[int, float], ...] = ()

    @classmethod
    def none(cls) -> "StrategyConfig":
        return cls(())

    @classmethod
    def from_mapping(cls, mapping) -> "StrategyConfig":
        return cls(tuple(sorted((int(k), float(v)) for k, v in dict(mapping).items())))

    @classmethod
    def from_json(cls, text: str | bytes) -> "StrategyConfig":
        """Decode a strategy file: a JSON list of {"component", "p_cms"} objects."""
        raw = json.loads(text)
        if not isinstance(raw, list):
            raise ValueError("strategy file must hold a JSON list")
        pairs = {}
        for i, item in enumerate(raw):
            if not isinstance(item, dict) or "component" not in item or "p_cms" not in item:
                raise ValueError(f"strategy entry {i} must be an object with 'component' and 'p_cms'")
            cid = item["component"]
            p = item["p_cms"]
            if not isinstance(cid, int) or isinstance(cid, bool):
                raise ValueError(f"strategy entry {i}: 'component' must be an integer id")
            if not isinstance(p, (int, float)) or isinstance(p, bool) or not (0.0 <= p <= 1.0):
                raise ValueError(f"strategy entry {i}: 'p_cms' must be a probability in [0, 1]")
            if cid in pairs:
                raise ValueError(f"strategy lists component {cid} twice")
            pairs[cid] = float(p)
        return cls.from_mapping(pairs)

    def to_json(self) -> str:
        items = [{"component": cid, "p_cms": p} for cid, p in self.detection]
        return json.dumps(items, indent=2) + "\n"

    @property
    def monitored_ids(self) -> tuple[int, ...]:
        return tuple(cid for cid, _ in self.detection)

    def p_cms(self, component_id: int) -> float:
        for cid, p in self.detection:
            if cid == component_id:
                return p
        return 0.0

    def check_against(self, model: SystemModel) -> None:
        known = {c.id for c in model.components}
        unknown = sorted(cid for cid, _ in self.detection if cid not in known)
        if unknown:
            raise ValueError(f"strategy references unknown component ids {unknown}")


def load_strategy(path) -> StrategyConfig:
    with open(path, "rb") as fh:
        return StrategyConfig.from_json(fh.read())


@dataclass
class IterationRecord:
    """Outcome of one iteration of the lifetime loop."""

    iteration: int
    t_op_sys: float
    t_degraded: float
    n_f_sys: int
    n_missions_completed: int
    n_cm: np.ndarray
    n_pm: np.ndarray
    t_op: np.ndarray
    n_f_module: np.ndarray


class _Compiled:
    """Model flattened to per-component arrays plus module metadata."""

    def __init__(self, model: SystemModel, modules: tuple[ModuleDef, ...]):
        comps = model.components
        self.n = len(comps)
        self.ids = np.array([c.id for c in comps], dtype=np.int64)
        self.col = {c.id: i for i, c in enumerate(comps)}
        self.scale = np.array([c.scale for c in comps])
        self.shape = np.array([c.shape for c in comps])
        self.is_spare = np.array([c.role != ROLE_STARTING for c in comps])
        self.is_cold = np.array([c.role != ROLE_STARTING and c.dormancy == 0.0 for c in comps])
        # Aging rate during a mission: 1 for active components, the dormancy
        # factor for spares that have not been activated.
        self.rate = np.where(self.is_spare, np.array([c.dormancy for c in comps]), 1.0)
        # Pending-failure exposure used by the CBM check.  Warm spares are
        # screened at their dormant aging rate; cold spares do not age while
        # dormant, so their monitor asks whether they could stand a full
        # mission of active duty (otherwise a cold-spare CMS could never
        # trigger maintenance at all).
        self.cbm_rate = np.where(self.rate > 0.0, self.rate, 1.0)
        self.n_r_max = np.array([c.max_min_repairs for c in comps], dtype=np.int64)
        self.modules = modules
        self.n_modules = len(modules)
        self.module_of = np.zeros(self.n, dtype=np.int64)
        for j, mod in enumerate(modules):
            for cid in mod.members:
                self.module_of[self.col[cid]] = j


class _CompiledStrategy:
    def __init__(self, strategy: StrategyConfig, compiled: _Compiled):
        pairs = [(compiled.col[cid], p) for cid, p in strategy.detection if p > 0.0]
        pairs.sort()
        self.cols = np.array([c for c, _ in pairs], dtype=np.int64)
        self.p = np.array([p for _, p in pairs])

    @property
    def any(self) -> bool:
        return self.cols.size > 0


class LifetimeState:
    """Mutable per-iteration component state, batched over iterations."""

    def __init__(self, batch: int, n_components: int, n_modules: int):
        b, n = batch, n_components
        self.t_op = np.zeros((b, n))
        self.t_acc = np.zeros((b, n))
        self.repair_age = np.zeros((b, n))
        self.t_fail = np.zeros((b, n))
        self.t_miss = np.full((b, n), np.inf)
        self.working = np.ones((b, n), dtype=bool)
        self.activated = np.zeros((b, n), dtype=bool)
        self.act_time = np.zeros((b, n))
        self.n_cm = np.zeros((b, n), dtype=np.int64)
        self.n_pm = np.zeros((b, n), dtype=np.int64)
        self.n_rep = np.zeros((b, n), dtype=np.int64)
        self.t_op_sys = np.zeros(b)
        self.t_degraded = np.zeros(b)
        self.n_f_sys = np.zeros(b, dtype=np.int64)
        self.n_complete = np.zeros(b, dtype=np.int64)
        self.n_f_mod = np.zeros((b, n_modules), dtype=np.int64)

    @property
    def batch(self) -> int:
        return self.t_op.shape[0]

    def reset_mission(self) -> None:
        self.t_miss.fill(np.inf)
        self.working.fill(True)
        self.activated.fill(False)
        self.act_time.fill(0.0)


def initialize_interarrivals(state: LifetimeState, compiled: _Compiled, streams: StreamBatch) -> None:
    """Draw the first failure interarrival for every component (fresh system)."""
    mask = np.ones((state.batch, compiled.n), dtype=bool)
    u = streams.draw_matrix(mask)
    state.t_fail = sample_first_interarrival(compiled.scale, compiled.shape, u)


def assess_cbm(
    state: LifetimeState,
    compiled: _Compiled,
    strategy: _CompiledStrategy,
    t_m: float,
    streams: StreamBatch,
) -> None:
    """Between-mission CBM check: detected pending failures get PM.

    Only components with accumulated operating time are assessed; dormant
    spares are checked against their dormancy-scaled mission exposure.
    """
    if not strategy.any:
        return
    cols = strategy.cols
    t_op = state.t_op[:, cols]
    pending = (t_op != 0.0) & (compiled.cbm_rate[cols] * t_m + t_op >= state.t_fail[:, cols])
    u = streams.draw_matrix(pending)
    detect = pending & (u < strategy.p)
    if not detect.any():
        return
    add = np.where(detect, t_op, 0.0)
    state.t_acc[:, cols] += add
    state.repair_age[:, cols] += add
    state.n_pm[:, cols] += detect
    state.t_op[:, cols] = np.where(detect, 0.0, t_op)
    u2 = streams.draw_matrix(detect)
    fresh = sample_conditional_interarrival(
        compiled.scale[cols], compiled.shape[cols], state.repair_age[:, cols], u2
    )
    state.t_fail[:, cols] = np.where(detect, fresh, state.t_fail[:, cols])


def assess_starting_components(state: LifetimeState, compiled: _Compiled, t_m: float) -> np.ndarray:
    """Flag every component that cannot complete the coming mission.

    Returns the failure mask; statuses are updated in place.  A lifetime
    exactly equal to the required exposure counts as a failure.
    """
    fails = compiled.rate * t_m + state.t_op >= state.t_fail
    state.working &= ~fails
    return fails


def _component_failure_times(state: LifetimeState, compiled: _Compiled) -> None:
    """Within-mission failure times for failed components.

    Starting components fail at ``t_fail - t_op``; dormant spares at
    ``(t_fail - t_op) / q`` (clamped at zero if bookkeeping aged the spare
    past its pending lifetime).  Activated spares are timed during SPARE
    gate evaluation.
    """
    failed = ~state.working
    if not failed.any():
        return
    if bool((failed & compiled.is_cold).any()):
        raise RuntimeError("cold spare flagged as failed while dormant; engine invariant broken")
    q = np.where(compiled.rate > 0.0, compiled.rate, 1.0)
    dormant_time = np.maximum((state.t_fail - state.t_op) / q, 0.0)
    start_time = state.t_fail - state.t_op
    t = np.where(compiled.is_spare, dormant_time, start_time)
    state.t_miss = np.where(failed, t, np.inf)


def _eval_node(node: Node, state: LifetimeState, compiled: _Compiled, t_m: float) -> np.ndarray:
    """Failure time of ``node`` within the current mission (+inf = no failure)."""
    if isinstance(node, Basic):
        i = compiled.col[node.component]
        return np.where(state.working[:, i], np.inf, state.t_miss[:, i])
    if isinstance(node, (OrGate, FdepGate)):
        children = node.children if isinstance(node, OrGate) else (node.trigger,) + node.dependents
        times = [_eval_node(c, state, compiled, t_m) for c in children]
        return np.minimum.reduce(times)
    if isinstance(node, AndGate):
        times = [_eval_node(c, state, compiled, t_m) for c in node.children]
        return np.maximum.reduce(times)
    if isinstance(node, VotingGate):
        times = np.column_stack([_eval_node(c, state, compiled, t_m) for c in node.children])
        return np.partition(times, node.k - 1, axis=1)[:, node.k - 1]
    if isinstance(node, SpareGate):
        return _eval_spare(node, state, compiled, t_m)
    raise TypeError(f"not a tree node: {node!r}")


def _eval_spare(node: SpareGate, state: LifetimeState, compiled: _Compiled, t_m: float) -> np.ndarray:
    """SPARE gate: spares activate in declared order when the primary fails.

    A spare that already failed dormant before the hand-over cannot cover;
    an activated spare fails ``t_fail - t_op`` hours after taking over, and
    covers the mission if that lands beyond ``t_m``.  Component statuses,
    failure times, and activation bookkeeping are updated in place.
    """
    t_act = _eval_node(node.primary, state, compiled, t_m)
    covered = np.zeros(state.batch, dtype=bool)
    for spare in node.spares:
        i = compiled.col[spare.component]
        needs_cover = np.isfinite(t_act) & ~covered
        dormant_death = np.where(state.working[:, i], np.inf, state.t_miss[:, i])
        attempt = needs_cover & (dormant_death > t_act)
        active_fail = t_act + (state.t_fail[:, i] - state.t_op[:, i])
        covers = attempt & (active_fail > t_m)
        fails_mid = attempt & ~(active_fail > t_m)
        state.working[:, i] |= covers
        state.working[:, i] &= ~fails_mid
        state.t_miss[:, i] = np.where(covers, np.inf, state.t_miss[:, i])
        state.t_miss[:, i] = np.where(fails_mid, active_fail, state.t_miss[:, i])
        state.activated[:, i] |= attempt
        state.act_time[:, i] = np.where(attempt, t_act, state.act_time[:, i])
        covered |= covers
        t_act = np.where(fails_mid, active_fail, t_act)
    return np.where(covered, np.inf, t_act)


def assess_modules(
    state: LifetimeState, compiled: _Compiled, t_m: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate every module subtree and pick the system failure, if any.

    Returns ``(module_times, t_f_sys, charged)``: per-module within-mission
    failure times (+inf where the module held), the system failure time per
    iteration (+inf if the mission survived), and the index of the single
    module charged with the failure (earliest failure; ties go to the
    lowest module index).
    """
    _component_failure_times(state, compiled)
    times = np.column_stack(
        [_eval_node(mod.subtree, state, compiled, t_m) for mod in compiled.modules]
    )
    t_f_sys = times.min(axis=1)
    charged = times.argmin(axis=1)
    return times, t_f_sys, charged


def verify_component_failures(state: LifetimeState, t_f_sys: np.ndarray) -> None:
    """Restore components whose failure would have happened after the system fell.

    Also undoes spare activations scheduled at or after the system failure
    time (the primary's failure was itself restored).
    """
    sys_failed = np.isfinite(t_f_sys)
    if not sys_failed.any():
        return
    horizon = t_f_sys[:, None]
    restore = sys_failed[:, None] & ~state.working & (state.t_miss > horizon)
    state.working |= restore
    state.t_miss = np.where(restore, np.inf, state.t_miss)
    undo = sys_failed[:, None] & state.activated & (state.act_time >= horizon)
    state.activated &= ~undo


def settle_mission(
    state: LifetimeState,
    compiled: _Compiled,
    t_m: float,
    t_f_sys: np.ndarray,
    charged: np.ndarray,
    streams: StreamBatch,
) -> None:
    """Close out the mission: tallies, degraded time, repairs, replacements.

    The mission horizon is ``t_m`` for completed missions and the system
    failure time otherwise.  Failed components accrue their pre-failure
    hours into accumulated time and repair age, receive CM, and draw a new
    interarrival; a component beyond its minimal-repair budget is replaced
    (repair age and repair count reset).  Degraded time runs from the
    earliest component failure that did not itself end the mission.
    """
    sys_failed = np.isfinite(t_f_sys)
    horizon = np.where(sys_failed, t_f_sys, t_m)

    state.t_op_sys += horizon
    state.n_complete += ~sys_failed
    state.n_f_sys += sys_failed
    rows = np.nonzero(sys_failed)[0]
    if rows.size:
        state.n_f_mod[rows, charged[rows]] += 1

    failed = ~state.working
    h2 = horizon[:, None]

    # Degraded time: earliest failure that was not the system-ending event.
    ending = sys_failed[:, None] & (compiled.module_of[None, :] == charged[:, None]) & (
        state.t_miss == t_f_sys[:, None]
    )
    onset = np.where(failed & ~ending, state.t_miss, np.inf).min(axis=1)
    state.t_degraded += np.where(np.isfinite(onset), np.maximum(horizon - onset, 0.0), 0.0)

    # Surviving components accrue mission exposure.
    active_cover = state.working & state.activated
    plain = state.working & ~state.activated
    state.t_op += np.where(plain, compiled.rate * h2, 0.0)
    state.t_op += np.where(
        active_cover, compiled.rate * state.act_time + (h2 - state.act_time), 0.0
    )

    if failed.any():
        # Pre-failure exposure of failed components feeds accumulated time
        # and repair age alike.
        failed_cover = failed & state.activated
        failed_dormant = failed & ~state.activated & compiled.is_spare
        failed_start = failed & ~state.activated & ~compiled.is_spare
        t_miss = np.where(failed, state.t_miss, 0.0)
        delta = np.where(failed_start, state.t_op + t_miss, 0.0)
        delta += np.where(failed_dormant, state.t_op + compiled.rate * t_miss, 0.0)
        delta += np.where(
            failed_cover,
            state.t_op + compiled.rate * state.act_time + (t_miss - state.act_time),
            0.0,
        )
        if bool((delta < 0.0).any()):
            raise RuntimeError("negative operating-time accrual; engine invariant broken")
        state.t_acc += delta
        state.repair_age += delta
        state.n_cm += failed
        state.n_rep += failed
        replace = state.n_rep > compiled.n_r_max
        state.repair_age = np.where(replace, 0.0, state.repair_age)
        state.n_rep = np.where(replace, 0, state.n_rep)
        state.t_op = np.where(failed, 0.0, state.t_op)
        u = streams.draw_matrix(failed)
        fresh = sample_conditional_interarrival(
            compiled.scale, compiled.shape, state.repair_age, u
        )
        state.t_fail = np.where(failed, fresh, state.t_fail)


def _complete_quiet_mission(state: LifetimeState, compiled: _Compiled, t_m: float) -> None:
    # Fast path for missions with no failed component anywhere in the batch.
    state.t_op_sys += t_m
    state.n_complete += 1
    state.t_op += compiled.rate * t_m


def _emit_trace(trace, state: LifetimeState, compiled: _Compiled, mission: int,
                before_cm, before_pm, t_f_sys, charged) -> None:
    n_cm, n_pm = state.n_cm[0], state.n_pm[0]
    for i in np.nonzero(n_pm - before_pm)[0]:
        trace({"mission": mission, "event": "pm", "component": int(compiled.ids[i])})
    for i in np.nonzero(n_cm - before_cm)[0]:
        t = state.t_miss[0, i]
        trace({
            "mission": mission,
            "event": "cm",
            "component": int(compiled.ids[i]),
            "time": None if not np.isfinite(t) else float(t),
        })
    if np.isfinite(t_f_sys[0]):
        trace({
            "mission": mission,
            "event": "system_failure",
            "module": int(charged[0]) + 1,
            "time": float(t_f_sys[0]),
        })


def simulate_batch(
    model: SystemModel,
    modules: tuple[ModuleDef, ...],
    strategy: StrategyConfig,
    scenario: ScenarioConfig,
    first_iteration: int,
    last_iteration: int,
    trace=None,
) -> list[IterationRecord]:
    """Run iterations ``first..last`` (1-based, inclusive) in lockstep."""
    compiled = _Compiled(model, modules)
    strat = _CompiledStrategy(strategy, compiled)
    batch = last_iteration - first_iteration + 1
    iters = np.arange(first_iteration, last_iteration + 1)
    streams = StreamBatch(scenario.seed, iters)
    state = LifetimeState(batch, compiled.n, compiled.n_modules)
    initialize_interarrivals(state, compiled, streams)
    t_m = scenario.t_m
    tracing = trace is not None and batch == 1

    for mission in range(1, scenario.n_missions + 1):
        state.reset_mission()
        if tracing:
            before_cm, before_pm = state.n_cm[0].copy(), state.n_pm[0].copy()
        assess_cbm(state, compiled, strat, t_m, streams)
        assess_starting_components(state, compiled, t_m)
        if state.working.all():
            _complete_quiet_mission(state, compiled, t_m)
            t_f_sys = np.full(batch, np.inf)
            charged = np.zeros(batch, dtype=np.int64)
        else:
            _, t_f_sys, charged = assess_modules(state, compiled, t_m)
            verify_component_failures(state, t_f_sys)
            settle_mission(state, compiled, t_m, t_f_sys, charged, streams)
        if tracing:
            _emit_trace(trace, state, compiled, mission, before_cm, before_pm, t_f_sys, charged)

    # Residual exposure of still-working components counts toward totals.
    state.t_acc += state.t_op

    return [
        IterationRecord(
            iteration=int(iters[b]),
            t_op_sys=float(state.t_op_sys[b]),
            t_degraded=float(state.t_degraded[b]),
            n_f_sys=int(state.n_f_sys[b]),
            n_missions_completed=int(state.n_complete[b]),
            n_cm=state.n_cm[b].copy(),
            n_pm=state.n_pm[b].copy(),
            t_op=state.t_acc[b].copy(),
            n_f_module=state.n_f_mod[b].copy(),
        )
        for b in range(batch)
    ]


def run_iteration(
    model: SystemModel,
    modules: tuple[ModuleDef, ...],
    strategy: StrategyConfig,
    scenario: ScenarioConfig,
    stream: RngStream,
    trace=None,
) -> IterationRecord:
    """Execute one full iteration on the stream's ``(seed, iteration)`` identity."""
    scen = ScenarioConfig(
        t_life=scenario.t_life,
        t_m=scenario.t_m,
        iterations=scenario.iterations,
        c_f_sys=scenario.c_f_sys,
        c_op=scenario.c_op,
        degraded_factor=scenario.degraded_factor,
        seed=stream.seed,
    )
    return simulate_batch(model, modules, strategy, scen, stream.iteration, stream.iteration, trace)[0]


def _campaign_chunk(args) -> list[IterationRecord]:
    model, modules, strategy, scenario, first, last = args
    return simulate_batch(model, modules, strategy, scenario, first, last)


def run_campaign(
    model: SystemModel,
    strategy: StrategyConfig,
    scenario: ScenarioConfig | None = None,
    *,
    iterations: int | None = None,
    seed: int | None = None,
    threads: int = 1,
    trace=None,
) -> list[IterationRecord]:
    """Run N independent iterations; results are ordered by iteration index.

    Iterations are keyed to ``(seed, index)`` streams, so the outcome is
    bit-identical for any ``threads`` value (worker processes simply split
    the index range).
    """
    scen = scenario if scenario is not None else model.scenario
    n = iterations if iterations is not None else scen.iterations
    if n < 1:
        raise ValueError("iterations must be at least 1")
    if seed is not None or n != scen.iterations:
        scen = ScenarioConfig(
            t_life=scen.t_life,
            t_m=scen.t_m,
            iterations=n,
            c_f_sys=scen.c_f_sys,
            c_op=scen.c_op,
            degraded_factor=scen.degraded_factor,
            seed=scen.seed if seed is None else seed,
        )
    strategy.check_against(model)
    modules = decompose(model)
    if threads <= 1 or n == 1:
        return simulate_batch(model, modules, strategy, scen, 1, n, trace)
    bounds = np.linspace(0, n, threads + 1, dtype=int)
    jobs = [
        (model, modules, strategy, scen, int(lo) + 1, int(hi))
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    records: list[IterationRecord] = []
    with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
        for chunk in pool.map(_campaign_chunk, jobs):
            records.extend(chunk)
    records.sort(key=lambda r: r.iteration)
    return records
