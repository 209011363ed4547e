"""Static system description: components, dynamic fault tree, scenario.

A system document is JSON with three top-level keys:

``components``
    List of objects: ``id`` (dense 1..N), ``label``, ``shape``, ``scale``
    (hours), ``role`` (``starting`` / ``cold-spare`` / ``warm-spare``),
    ``dormancy`` (required for spares: 0 for cold, strictly between 0 and 1
    for warm; defaults to 1 for starting components), ``cm_cost``,
    ``pm_cost``, ``cms_investment`` (dollars), ``max_min_repairs`` (count of
    minimal repairs before the next repair becomes a replacement), and an
    optional informational ``exp_rate`` (the exponential failure rate the
    Weibull scale was converted from, preserving MTTF).

``tree``
    The fault tree as a tagged union.  ``{"basic": <id>}`` is a component
    leaf; gates are ``{"gate": "OR"|"AND", "children": [...]}``,
    ``{"gate": "VOTING", "k": int, "children": [...]}``,
    ``{"gate": "SPARE", "primary": node, "spares": [node, ...]}`` and
    ``{"gate": "FDEP", "trigger": node, "dependents": [node, ...]}``.
    Gates may carry a ``label``; labelled OR gates group their subtrees
    into named subsystems for reporting.

``scenario``
    ``t_life``, ``t_m`` (hours, with t_life an exact multiple of t_m),
    ``iterations``, ``c_f_sys``, ``c_op`` (dollars, dollars/hour),
    ``degraded_factor`` in [0, 1], and the default ``seed``.

Priority-AND and sequence-enforcing gates are not supported and are
rejected at parse time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Union

ROLE_STARTING = "starting"
ROLE_COLD_SPARE = "cold-spare"
ROLE_WARM_SPARE = "warm-spare"
ROLES = (ROLE_STARTING, ROLE_COLD_SPARE, ROLE_WARM_SPARE)

_UNSUPPORTED_GATES = ("PAND", "SEQ")


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


class ModelError(Exception):
    """A document could not be turned into a simulable model."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        lines = "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(f"invalid system model:\n{lines}")


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "model is valid"
        return "\n".join(str(v) for v in self.violations)


@dataclass(frozen=True)
class ComponentSpec:
    id: int
    label: str
    shape: float
    scale: float
    role: str = ROLE_STARTING
    dormancy: float = 1.0
    cm_cost: float = 0.0
    pm_cost: float = 0.0
    cms_investment: float = 0.0
    max_min_repairs: int = 0
    exp_rate: float | None = None

    @property
    def mttf(self) -> float:
        return self.scale * math.gamma(1.0 + 1.0 / self.shape)


@dataclass(frozen=True)
class Basic:
    component: int


@dataclass(frozen=True)
class OrGate:
    children: tuple["Node", ...]
    label: str | None = None


@dataclass(frozen=True)
class AndGate:
    children: tuple["Node", ...]
    label: str | None = None


@dataclass(frozen=True)
class VotingGate:
    k: int
    children: tuple["Node", ...]
    label: str | None = None


@dataclass(frozen=True)
class SpareGate:
    primary: "Node"
    spares: tuple["Node", ...]
    label: str | None = None


@dataclass(frozen=True)
class FdepGate:
    trigger: "Node"
    dependents: tuple["Node", ...]
    label: str | None = None


Node = Union[Basic, OrGate, AndGate, VotingGate, SpareGate, FdepGate]


@dataclass(frozen=True)
class ScenarioConfig:
    t_life: float
    t_m: float
    iterations: int
    c_f_sys: float
    c_op: float
    degraded_factor: float
    seed: int

    @property
    def n_missions(self) -> int:
        return int(round(self.t_life / self.t_m))


@dataclass(frozen=True)
class SystemModel:
    components: tuple[ComponentSpec, ...]
    tree: Node
    scenario: ScenarioConfig

    @property
    def n_components(self) -> int:
        return len(self.components)

    def component(self, component_id: int) -> ComponentSpec:
        for comp in self.components:
            if comp.id == component_id:
                return comp
        raise KeyError(f"no component with id {component_id}")

    def critical_ids(self) -> frozenset[int]:
        """Components whose lone failure brings the system down."""
        from .modules import critical_ids

        return critical_ids(self)


def child_nodes(node: Node) -> tuple[Node, ...]:
    if isinstance(node, Basic):
        return ()
    if isinstance(node, (OrGate, AndGate, VotingGate)):
        return node.children
    if isinstance(node, SpareGate):
        return (node.primary,) + node.spares
    if isinstance(node, FdepGate):
        return (node.trigger,) + node.dependents
    raise TypeError(f"not a tree node: {node!r}")


def iter_nodes(node: Node) -> Iterator[Node]:
    """Preorder walk over the tree."""
    yield node
    for child in child_nodes(node):
        yield from iter_nodes(child)


def leaf_components(node: Node) -> list[int]:
    """Component ids referenced below ``node``, in leaf order (with repeats)."""
    return [n.component for n in iter_nodes(node) if isinstance(n, Basic)]


# ---------------------------------------------------------------------------
# Parsing


def _decode_node(raw, path: str, violations: list[Violation]) -> Node | None:
    if not isinstance(raw, dict):
        violations.append(Violation(path, "tree node must be an object"))
        return None
    if "basic" in raw:
        cid = raw["basic"]
        if not isinstance(cid, int) or isinstance(cid, bool):
            violations.append(Violation(path, "basic leaf must hold an integer component id"))
            return None
        return Basic(cid)
    kind = raw.get("gate")
    if kind in _UNSUPPORTED_GATES:
        violations.append(
            Violation(path, f"{kind} gates are not supported; model the ordering constraint another way")
        )
        return None
    label = raw.get("label")
    if label is not None and not isinstance(label, str):
        violations.append(Violation(path, "gate label must be a string"))
        label = None

    def decode_list(key: str) -> tuple[Node, ...]:
        items = raw.get(key)
        if not isinstance(items, list) or not items:
            violations.append(Violation(path, f"gate requires a non-empty '{key}' list"))
            return ()
        out = []
        for i, item in enumerate(items):
            node = _decode_node(item, f"{path}.{key}[{i}]", violations)
            if node is not None:
                out.append(node)
        return tuple(out)

    if kind in ("OR", "AND"):
        children = decode_list("children")
        cls = OrGate if kind == "OR" else AndGate
        return cls(children, label) if children else None
    if kind == "VOTING":
        k = raw.get("k")
        if not isinstance(k, int) or isinstance(k, bool):
            violations.append(Violation(path, "VOTING gate requires an integer 'k'"))
            return None
        children = decode_list("children")
        return VotingGate(k, children, label) if children else None
    if kind == "SPARE":
        if "primary" not in raw:
            violations.append(Violation(path, "SPARE gate requires a 'primary' node"))
            return None
        primary = _decode_node(raw["primary"], f"{path}.primary", violations)
        spares = decode_list("spares")
        if primary is None or not spares:
            return None
        return SpareGate(primary, spares, label)
    if kind == "FDEP":
        if "trigger" not in raw:
            violations.append(Violation(path, "FDEP gate requires a 'trigger' node"))
            return None
        trigger = _decode_node(raw["trigger"], f"{path}.trigger", violations)
        dependents = decode_list("dependents")
        if trigger is None or not dependents:
            return None
        return FdepGate(trigger, dependents, label)
    violations.append(Violation(path, f"unknown gate kind {kind!r}"))
    return None


_COMPONENT_FIELDS = {
    "shape": float,
    "scale": float,
    "cm_cost": float,
    "pm_cost": float,
    "cms_investment": float,
}


def _decode_component(raw, path: str, violations: list[Violation]) -> ComponentSpec | None:
    if not isinstance(raw, dict):
        violations.append(Violation(path, "component must be an object"))
        return None
    problems = len(violations)
    cid = raw.get("id")
    if not isinstance(cid, int) or isinstance(cid, bool):
        violations.append(Violation(path, "component requires an integer 'id'"))
        cid = -1
    label = raw.get("label", f"component {cid}")
    if not isinstance(label, str):
        violations.append(Violation(path, "label must be a string"))
        label = str(label)
    values = {}
    for name, cast in _COMPONENT_FIELDS.items():
        v = raw.get(name)
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            violations.append(Violation(path, f"'{name}' must be a number"))
            values[name] = 0.0
        else:
            values[name] = cast(v)
    role = raw.get("role", ROLE_STARTING)
    if role not in ROLES:
        violations.append(Violation(path, f"role must be one of {ROLES}"))
        role = ROLE_STARTING
    dormancy = raw.get("dormancy", 1.0 if role == ROLE_STARTING else None)
    if not isinstance(dormancy, (int, float)) or isinstance(dormancy, bool):
        violations.append(Violation(path, "'dormancy' must be given for spare roles"))
        dormancy = 0.0
    repairs = raw.get("max_min_repairs", 0)
    if not isinstance(repairs, int) or isinstance(repairs, bool) or repairs < 0:
        violations.append(Violation(path, "'max_min_repairs' must be a non-negative integer"))
        repairs = 0
    exp_rate = raw.get("exp_rate")
    if exp_rate is not None and (not isinstance(exp_rate, (int, float)) or isinstance(exp_rate, bool)):
        violations.append(Violation(path, "'exp_rate' must be a number when present"))
        exp_rate = None
    if len(violations) > problems:
        return None
    return ComponentSpec(
        id=cid,
        label=label,
        shape=values["shape"],
        scale=values["scale"],
        role=role,
        dormancy=float(dormancy),
        cm_cost=values["cm_cost"],
        pm_cost=values["pm_cost"],
        cms_investment=values["cms_investment"],
        max_min_repairs=repairs,
        exp_rate=None if exp_rate is None else float(exp_rate),
    )


def _decode_scenario(raw, violations: list[Violation]) -> ScenarioConfig | None:
    if not isinstance(raw, dict):
        violations.append(Violation("scenario", "scenario must be an object"))
        return None
    problems = len(violations)
    numbers = {}
    for name in ("t_life", "t_m", "c_f_sys", "c_op", "degraded_factor"):
        v = raw.get(name)
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            violations.append(Violation(f"scenario.{name}", "must be a number"))
            numbers[name] = 0.0
        else:
            numbers[name] = float(v)
    ints = {}
    for name in ("iterations", "seed"):
        v = raw.get(name)
        if not isinstance(v, int) or isinstance(v, bool):
            violations.append(Violation(f"scenario.{name}", "must be an integer"))
            ints[name] = 0
        else:
            ints[name] = v
    if len(violations) > problems:
        return None
    return ScenarioConfig(
        t_life=numbers["t_life"],
        t_m=numbers["t_m"],
        iterations=ints["iterations"],
        c_f_sys=numbers["c_f_sys"],
        c_op=numbers["c_op"],
        degraded_factor=numbers["degraded_factor"],
        seed=ints["seed"],
    )


def parse_system(document: str | bytes | dict) -> SystemModel:
    """Parse and validate a system document; raise ModelError on violations."""
    if isinstance(document, (str, bytes)):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ModelError([Violation("document", f"not valid JSON: {exc}")]) from exc
    else:
        raw = document
    if not isinstance(raw, dict):
        raise ModelError([Violation("document", "top level must be an object")])

    violations: list[Violation] = []
    raw_components = raw.get("components")
    if not isinstance(raw_components, list) or not raw_components:
        violations.append(Violation("components", "a non-empty component list is required"))
        raw_components = []
    components = []
    for i, item in enumerate(raw_components):
        comp = _decode_component(item, f"components[{i}]", violations)
        if comp is not None:
            components.append(comp)

    tree = None
    if "tree" not in raw:
        violations.append(Violation("tree", "a fault tree is required"))
    else:
        tree = _decode_node(raw["tree"], "tree", violations)

    scenario = None
    if "scenario" not in raw:
        violations.append(Violation("scenario", "scenario constants are required"))
    else:
        scenario = _decode_scenario(raw["scenario"], violations)

    if violations or tree is None or scenario is None:
        raise ModelError(violations)

    model = SystemModel(
        components=tuple(sorted(components, key=lambda c: c.id)),
        tree=tree,
        scenario=scenario,
    )
    report = validate(model)
    if not report.ok:
        raise ModelError(report.violations)
    return model


def load_system(path) -> SystemModel:
    with open(path, "rb") as fh:
        return parse_system(fh.read())


# ---------------------------------------------------------------------------
# Validation


def validate(model: SystemModel) -> ValidationReport:
    """Check every model invariant; an empty report means the model is simulable."""
    v: list[Violation] = []
    by_id: dict[int, ComponentSpec] = {}
    for i, comp in enumerate(model.components):
        path = f"components[{i}](id={comp.id})"
        if comp.id in by_id:
            v.append(Violation(path, f"duplicate component id {comp.id}"))
        by_id[comp.id] = comp
        if comp.scale <= 0:
            v.append(Violation(path, "scale must be strictly positive"))
        if comp.shape <= 0:
            v.append(Violation(path, "shape must be strictly positive"))
        for name in ("cm_cost", "pm_cost", "cms_investment"):
            if getattr(comp, name) < 0:
                v.append(Violation(path, f"{name} must be non-negative"))
        if comp.pm_cost > comp.cm_cost:
            v.append(Violation(path, "pm_cost must not exceed cm_cost"))
        if comp.max_min_repairs < 0:
            v.append(Violation(path, "max_min_repairs must be non-negative"))
        if comp.role == ROLE_COLD_SPARE and comp.dormancy != 0.0:
            v.append(Violation(path, "cold-spare must have dormancy 0"))
        elif comp.role == ROLE_WARM_SPARE and not (0.0 < comp.dormancy < 1.0):
            v.append(Violation(path, "warm-spare dormancy must lie strictly between 0 and 1"))
        elif comp.role == ROLE_STARTING and comp.dormancy != 1.0:
            v.append(Violation(path, "starting components age at full rate; dormancy must be 1"))

    ids = sorted(by_id)
    if ids and ids != list(range(1, len(ids) + 1)):
        v.append(Violation("components", "component ids must be densely numbered 1..N"))

    # Tree structure.
    seen_leaves: dict[int, int] = {}
    spare_leaf_ids: set[int] = set()
    for node in iter_nodes(model.tree):
        if isinstance(node, Basic):
            seen_leaves[node.component] = seen_leaves.get(node.component, 0) + 1
            if node.component not in by_id:
                v.append(Violation("tree", f"basic event references unknown component {node.component}"))
        elif isinstance(node, VotingGate):
            if not (1 <= node.k <= len(node.children)):
                v.append(
                    Violation(
                        "tree",
                        f"VOTING gate needs 1 <= k <= children; got k={node.k} over {len(node.children)}",
                    )
                )
        elif isinstance(node, SpareGate):
            for s in node.spares:
                if not isinstance(s, Basic):
                    v.append(Violation("tree", "SPARE gate spares must be basic component leaves"))
                    continue
                spare_leaf_ids.add(s.component)
                comp = by_id.get(s.component)
                if comp is not None and comp.role == ROLE_STARTING:
                    v.append(
                        Violation("tree", f"component {s.component} is a SPARE gate spare but has role 'starting'")
                    )
    for cid, count in sorted(seen_leaves.items()):
        if count > 1:
            v.append(Violation("tree", f"duplicate leaf: component {cid} appears in {count} basic events"))
    for cid in ids:
        if cid not in seen_leaves:
            v.append(Violation("tree", f"component {cid} never appears as a basic event"))
    for cid in ids:
        comp = by_id[cid]
        if comp.role != ROLE_STARTING and cid in seen_leaves and cid not in spare_leaf_ids:
            v.append(Violation("tree", f"spare-role component {cid} is not attached to a SPARE gate"))

    # Scenario.
    sc = model.scenario
    if sc.t_life <= 0 or sc.t_m <= 0:
        v.append(Violation("scenario", "t_life and t_m must be strictly positive"))
    else:
        ratio = sc.t_life / sc.t_m
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            v.append(Violation("scenario", "t_life must be a positive integer multiple of t_m"))
    if sc.iterations < 1:
        v.append(Violation("scenario", "iterations must be at least 1"))
    for name in ("c_f_sys", "c_op"):
        if getattr(sc, name) < 0:
            v.append(Violation(f"scenario.{name}", "must be non-negative"))
    if not (0.0 <= sc.degraded_factor <= 1.0):
        v.append(Violation("scenario.degraded_factor", "must lie in [0, 1]"))
    if not (0 <= sc.seed < 2**64):
        v.append(Violation("scenario.seed", "must fit in an unsigned 64-bit integer"))

    return ValidationReport(tuple(v))


# ---------------------------------------------------------------------------
# Serialization


def _encode_node(node: Node) -> dict:
    if isinstance(node, Basic):
        return {"basic": node.component}
    out: dict = {}
    if isinstance(node, OrGate):
        out = {"gate": "OR", "children": [_encode_node(c) for c in node.children]}
    elif isinstance(node, AndGate):
        out = {"gate": "AND", "children": [_encode_node(c) for c in node.children]}
    elif isinstance(node, VotingGate):
        out = {"gate": "VOTING", "k": node.k, "children": [_encode_node(c) for c in node.children]}
    elif isinstance(node, SpareGate):
        out = {
            "gate": "SPARE",
            "primary": _encode_node(node.primary),
            "spares": [_encode_node(s) for s in node.spares],
        }
    elif isinstance(node, FdepGate):
        out = {
            "gate": "FDEP",
            "trigger": _encode_node(node.trigger),
            "dependents": [_encode_node(d) for d in node.dependents],
        }
    else:
        raise TypeError(f"not a tree node: {node!r}")
    if node.label is not None:
        out["label"] = node.label
    return out


def serialize_system(model: SystemModel) -> dict:
    """Encode a model back into the document form accepted by parse_system."""
    components = []
    for comp in model.components:
        item = {
            "id": comp.id,
            "label": comp.label,
            "shape": comp.shape,
            "scale": comp.scale,
            "role": comp.role,
            "cm_cost": comp.cm_cost,
            "pm_cost": comp.pm_cost,
            "cms_investment": comp.cms_investment,
            "max_min_repairs": comp.max_min_repairs,
        }
        if comp.role != ROLE_STARTING:
            item["dormancy"] = comp.dormancy
        if comp.exp_rate is not None:
            item["exp_rate"] = comp.exp_rate
        components.append(item)
    sc = model.scenario
    return {
        "components": components,
        "tree": _encode_node(model.tree),
        "scenario": {
            "t_life": sc.t_life,
            "t_m": sc.t_m,
            "iterations": sc.iterations,
            "c_f_sys": sc.c_f_sys,
            "c_op": sc.c_op,
            "degraded_factor": sc.degraded_factor,
            "seed": sc.seed,
        },
    }
