"""Decomposition of the fault tree into independent failure modules.

A module is a maximal subtree that reaches the top event through OR gates
only, so the failure of any single module is sufficient to fail the
system.  Modules partition the component set: every component belongs to
exactly one module, and a component that forms a singleton module is
critical (its lone failure brings the system down).

Modules are numbered 1..N in depth-first document order of the tree, which
keeps module indices stable across runs and aligned with the order in
which subsystems and gates appear in the system file.  A module inherits
the label of the innermost labelled OR gate above it, which the reporting
layer uses to group failures by subsystem.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Node, OrGate, SystemModel, leaf_components


class DecompositionError(Exception):
    """The tree cannot be split into disjoint OR-composed modules."""


@dataclass(frozen=True)
class ModuleDef:
    index: int
    members: tuple[int, ...]
    subtree: Node
    subsystem: str | None = None


def decompose(model: SystemModel) -> tuple[ModuleDef, ...]:
    """Split a validated model into its failure modules.

    Pure function of the model: the same model always yields the same
    modules in the same order.
    """
    roots: list[tuple[Node, str | None]] = []

    def flatten(node: Node, enclosing: str | None) -> None:
        if isinstance(node, OrGate):
            label = node.label if node.label is not None else enclosing
            for child in node.children:
                flatten(child, label)
        else:
            roots.append((node, enclosing))

    flatten(model.tree, None)

    owner: dict[int, int] = {}
    modules: list[ModuleDef] = []
    for index, (node, subsystem) in enumerate(roots, start=1):
        members = leaf_components(node)
        for cid in members:
            if cid in owner:
                raise DecompositionError(
                    f"component {cid} is shared between modules {owner[cid]} and {index}; "
                    "the tree is not an OR-composition of independent subtrees"
                )
            owner[cid] = index
        modules.append(ModuleDef(index, tuple(sorted(members)), node, subsystem))

    missing = sorted({c.id for c in model.components} - owner.keys())
    if missing:
        raise DecompositionError(f"components {missing} are not reachable from the tree")
    return tuple(modules)


def critical_ids(model: SystemModel) -> frozenset[int]:
    """Components forming singleton modules."""
    return frozenset(m.members[0] for m in decompose(model) if len(m.members) == 1)


def module_of_component(modules: tuple[ModuleDef, ...]) -> dict[int, int]:
    """Map component id -> owning module index."""
    out: dict[int, int] = {}
    for mod in modules:
        for cid in mod.members:
            out[cid] = mod.index
    return out
