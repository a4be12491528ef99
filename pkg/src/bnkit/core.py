"""Domain types for discrete Bayesian networks.

A network is a DAG over discrete variables plus one conditional
probability table (CPT) per node; the joint distribution factorizes as
the product of the per-node conditionals.

CPT layout is canonical and shared by every consumer of this module:
rows are parent configurations indexed with the FIRST-listed parent most
significant (the last parent varies fastest), columns are the child's
states in declaration order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, StructuralError

ROW_SUM_EXACT_TOL = 1e-12
ROW_SUM_REPAIR_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteVariable:
    """A named variable with an ordered set of state labels."""

    name: str
    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) < 2:
            raise ContractError(f"variable {self.name!r} needs >= 2 states")
        if len(set(self.states)) != len(self.states):
            raise ContractError(f"variable {self.name!r} has duplicate state labels")

    @property
    def cardinality(self) -> int:
        return len(self.states)

    def state_index(self, state: str | int) -> int:
        """Resolve a state given either its label or its index."""
        if isinstance(state, (int, np.integer)):
            if not 0 <= state < len(self.states):
                raise ContractError(
                    f"state index {state} out of range for variable {self.name!r}"
                )
            return int(state)
        try:
            return self.states.index(state)
        except ValueError:
            raise ContractError(
                f"unknown state {state!r} for variable {self.name!r}; "
                f"valid states: {list(self.states)}"
            ) from None


def _toposort(nodes: tuple[str, ...], arcs: frozenset[tuple[str, str]]) -> list[str]:
    """Kahn's algorithm with ties broken by node declaration order."""
    position = {n: i for i, n in enumerate(nodes)}
    indegree = {n: 0 for n in nodes}
    children: dict[str, list[str]] = {n: [] for n in nodes}
    for parent, child in arcs:
        indegree[child] += 1
        children[parent].append(child)
    ready = sorted((n for n in nodes if indegree[n] == 0), key=position.__getitem__)
    order: list[str] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        for child in sorted(children[node], key=position.__getitem__):
            indegree[child] -= 1
            if indegree[child] == 0:
                # insertion keeps the ready list in declaration order
                ready.append(child)
                ready.sort(key=position.__getitem__)
    if len(order) != len(nodes):
        raise StructuralError(f"cycle detected through arc {_find_cycle_arc(nodes, arcs)}")
    return order


def _find_cycle_arc(
    nodes: tuple[str, ...], arcs: frozenset[tuple[str, str]]
) -> tuple[str, str]:
    """Return one arc lying on a directed cycle (assumes one exists)."""
    children: dict[str, list[str]] = {n: [] for n in nodes}
    for parent, child in sorted(arcs):
        children[parent].append(child)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}

    def visit(node: str) -> tuple[str, str] | None:
        color[node] = GRAY
        for child in children[node]:
            if color[child] == GRAY:
                return (node, child)
            if color[child] == WHITE:
                found = visit(child)
                if found:
                    return found
        color[node] = BLACK
        return None

    for n in nodes:
        if color[n] == WHITE:
            arc = visit(n)
            if arc:
                return arc
    raise AssertionError("no cycle found in graph declared cyclic")


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph over named nodes."""

    nodes: tuple[str, ...]
    arcs: frozenset[tuple[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "arcs", frozenset(tuple(a) for a in self.arcs))
        if len(set(self.nodes)) != len(self.nodes):
            raise StructuralError("duplicate node names")
        declared = set(self.nodes)
        for parent, child in self.arcs:
            if parent == child:
                raise StructuralError(f"self-arc {parent}->{child}")
            if parent not in declared or child not in declared:
                raise StructuralError(f"arc {parent}->{child} references undeclared node")
        _toposort(self.nodes, self.arcs)  # raises on cycles

    def parents_of(self, node: str) -> tuple[str, ...]:
        """Parents of ``node`` in declaration order (the canonical CPT order)."""
        if node not in self.nodes:
            raise StructuralError(f"unknown node {node!r}")
        position = {n: i for i, n in enumerate(self.nodes)}
        return tuple(
            sorted((p for p, c in self.arcs if c == node), key=position.__getitem__)
        )

    def children_of(self, node: str) -> tuple[str, ...]:
        position = {n: i for i, n in enumerate(self.nodes)}
        return tuple(
            sorted((c for p, c in self.arcs if p == node), key=position.__getitem__)
        )


def topological_order(dag: Dag) -> list[str]:
    """Order nodes so every parent precedes its children.

    Ties are broken by node declaration order, so the result is
    deterministic for a given ``Dag``.
    """
    return _toposort(dag.nodes, dag.arcs)


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table for one variable.

    ``table`` has one row per parent configuration (``q`` rows) and one
    column per state of the variable (``r`` columns). Rows are
    distributions: entries in [0, 1] summing to 1 within 1e-12. Rows
    drifting by at most 1e-9 are renormalized with a warning; anything
    worse is rejected.
    """

    variable: str
    parents: tuple[str, ...]
    parent_cards: tuple[int, ...]
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "parent_cards", tuple(int(c) for c in self.parent_cards))
        if len(self.parents) != len(self.parent_cards):
            raise ContractError("parents and parent_cards must align")
        table = np.asarray(self.table, dtype=np.float64)
        if table.ndim != 2:
            raise ContractError(f"CPT for {self.variable!r} must be 2-D")
        q = 1
        for c in self.parent_cards:
            q *= c
        if table.shape[0] != q:
            raise ContractError(
                f"CPT for {self.variable!r} has {table.shape[0]} rows, "
                f"expected {q} parent configurations"
            )
        if np.any(table < 0.0) or np.any(table > 1.0):
            raise ContractError(f"CPT for {self.variable!r} has entries outside [0, 1]")
        drift = np.abs(table.sum(axis=1) - 1.0)
        worst = float(drift.max()) if drift.size else 0.0
        if worst > ROW_SUM_REPAIR_TOL:
            raise ContractError(
                f"CPT row for {self.variable!r} sums off by {worst:.3e} (> {ROW_SUM_REPAIR_TOL})"
            )
        if worst > ROW_SUM_EXACT_TOL:
            warnings.warn(
                f"renormalizing CPT rows for {self.variable!r} (drift {worst:.3e})",
                stacklevel=2,
            )
            table = table / table.sum(axis=1, keepdims=True)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def n_rows(self) -> int:
        return self.table.shape[0]

    @property
    def n_states(self) -> int:
        return self.table.shape[1]

    def strides(self) -> tuple[int, ...]:
        """Row-index stride per parent; first parent most significant."""
        strides = []
        acc = 1
        for card in reversed(self.parent_cards):
            strides.append(acc)
            acc *= card
        return tuple(reversed(strides))


def parent_config_index(cpt: Cpt, assignment: dict[str, int]) -> int:
    """Row index of a parent configuration.

    ``assignment`` maps each parent to a state index. The first-listed
    parent is most significant (the last parent varies fastest), making
    the mapping a bijection onto ``range(q)``.
    """
    index = 0
    for parent, card, stride in zip(cpt.parents, cpt.parent_cards, cpt.strides()):
        if parent not in assignment:
            raise ContractError(f"assignment missing parent {parent!r} of {cpt.variable!r}")
        state = int(assignment[parent])
        if not 0 <= state < card:
            raise ContractError(
                f"state index {state} out of range for parent {parent!r} (cardinality {card})"
            )
        index += state * stride
    return index


def parent_config_decode(cpt: Cpt, index: int) -> dict[str, int]:
    """Inverse of :func:`parent_config_index`."""
    if not 0 <= index < cpt.n_rows:
        raise ContractError(f"row index {index} out of range for {cpt.variable!r}")
    out: dict[str, int] = {}
    rest = int(index)
    for parent, stride in zip(cpt.parents, cpt.strides()):
        out[parent], rest = divmod(rest, stride)
    return out


@dataclass(frozen=True)
class BayesianNetwork:
    """Immutable fitted network: variables, DAG, and one CPT per node."""

    variables: tuple[DiscreteVariable, ...]
    dag: Dag
    cpts: tuple[Cpt, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "cpts", tuple(self.cpts))
        names = tuple(v.name for v in self.variables)
        if names != self.dag.nodes:
            raise StructuralError("variable order must match DAG node order")
        by_name = {v.name: v for v in self.variables}
        cpt_names = [c.variable for c in self.cpts]
        if sorted(cpt_names) != sorted(names):
            raise StructuralError("need exactly one CPT per node")
        for cpt in self.cpts:
            expected = self.dag.parents_of(cpt.variable)
            if cpt.parents != expected:
                raise StructuralError(
                    f"CPT parents for {cpt.variable!r} are {cpt.parents}, "
                    f"DAG says {expected}"
                )
            cards = tuple(by_name[p].cardinality for p in cpt.parents)
            if cpt.parent_cards != cards:
                raise StructuralError(f"CPT parent cardinalities wrong for {cpt.variable!r}")
            if cpt.n_states != by_name[cpt.variable].cardinality:
                raise StructuralError(f"CPT column count wrong for {cpt.variable!r}")

    def variable(self, name: str) -> DiscreteVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise ContractError(f"unknown variable {name!r}")

    def cpt(self, name: str) -> Cpt:
        for c in self.cpts:
            if c.variable == name:
                return c
        raise ContractError(f"unknown variable {name!r}")

    @property
    def node_names(self) -> tuple[str, ...]:
        return self.dag.nodes

    def state_indices(self, assignment: dict[str, str | int]) -> dict[str, int]:
        """Normalize an assignment of labels or indices to state indices."""
        out = {}
        for name, state in assignment.items():
            out[name] = self.variable(name).state_index(state)
        return out


def joint_probability(
    network: BayesianNetwork, full_assignment: dict[str, str | int]
) -> float:
    """Probability of one complete assignment: the product of CPT entries."""
    missing = [n for n in network.node_names if n not in full_assignment]
    if missing:
        raise ContractError(f"assignment missing variables {missing}")
    idx = network.state_indices(full_assignment)
    prob = 1.0
    for cpt in network.cpts:
        row = parent_config_index(cpt, idx)
        prob *= float(cpt.table[row, idx[cpt.variable]])
    return prob
