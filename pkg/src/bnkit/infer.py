"""Exact inference by variable elimination.

Evidence is applied by reducing CPT factors before elimination, the
elimination order is min-fill with lexicographic ties, and factors are
rescaled by their maximum at each step (the scale accumulates in log
space) so the evidence probability never underflows. Most probable
explanations use max-product elimination with argmax traceback over all
unobserved variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BayesianNetwork
from .errors import ContractError, ImpossibleEvidenceError

Evidence = dict[str, str]


@dataclass(frozen=True)
class Factor:
    """Non-negative table over an ordered variable scope.

    Values are stored with one array axis per scope variable, so the
    flat layout follows the package's configuration rule (first scope
    variable most significant).
    """

    scope: tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != len(self.scope):
            raise ContractError("factor values must have one axis per scope variable")
        if values.size and values.min() < 0:
            raise ContractError("factor values must be non-negative")
        object.__setattr__(self, "values", values)

    def multiply(self, other: "Factor") -> "Factor":
        scope = self.scope + tuple(v for v in other.scope if v not in self.scope)
        return Factor(scope, self._expand(scope) * other._expand(scope))

    def _expand(self, scope: tuple[str, ...]) -> np.ndarray:
        """Values broadcast over ``scope`` (a superset, order given)."""
        src = {v: i for i, v in enumerate(self.scope)}
        present = [v for v in scope if v in src]
        arr = self.values.transpose([src[v] for v in present])
        return arr.reshape(
            [arr.shape[present.index(v)] if v in src else 1 for v in scope]
        )

    def sum_out(self, var: str) -> "Factor":
        axis = self.scope.index(var)
        return Factor(
            self.scope[:axis] + self.scope[axis + 1 :], self.values.sum(axis=axis)
        )

    def max_out(self, var: str) -> tuple["Factor", np.ndarray]:
        axis = self.scope.index(var)
        return (
            Factor(self.scope[:axis] + self.scope[axis + 1 :], self.values.max(axis=axis)),
            self.values.argmax(axis=axis),
        )

    def reduce(self, var: str, state: int) -> "Factor":
        axis = self.scope.index(var)
        return Factor(
            self.scope[:axis] + self.scope[axis + 1 :],
            np.take(self.values, state, axis=axis),
        )


@dataclass(frozen=True)
class Posterior:
    target: str
    states: tuple[str, ...]
    probabilities: tuple[float, ...]
    p_evidence: float
    log_p_evidence: float

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.states, self.probabilities))


def _check_evidence(net: BayesianNetwork, ev: Evidence) -> dict[str, int]:
    return net.state_indices(dict(ev))


def _cpt_factor(net: BayesianNetwork, node: str) -> Factor:
    cpt = net.cpt(node)
    scope = cpt.parents + (node,)
    cards = cpt.parent_cards + (cpt.n_states,)
    return Factor(scope, cpt.table.reshape(cards))


def _barren_pruned(net: BayesianNetwork, keep: set[str]) -> list[str]:
    """Nodes remaining after repeatedly dropping childless nodes outside
    ``keep``; their CPTs sum out to one and cannot affect the query."""
    remaining = set(net.node_names)
    changed = True
    while changed:
        changed = False
        for node in list(remaining):
            if node in keep:
                continue
            if not any(c in remaining for c in net.dag.children_of(node)):
                remaining.discard(node)
                changed = True
    return [n for n in net.node_names if n in remaining]


def _min_fill_order(scopes: list[tuple[str, ...]], eliminate: set[str]) -> list[str]:
    """Min-fill elimination order over the factor interaction graph,
    ties broken lexicographically."""
    adjacency: dict[str, set[str]] = {}
    for scope in scopes:
        for v in scope:
            adjacency.setdefault(v, set())
            for w in scope:
                if w != v:
                    adjacency[v].add(w)
    order = []
    todo = {v for v in eliminate if v in adjacency}
    # variables in no factor scope can be eliminated trivially first
    order.extend(sorted(v for v in eliminate if v not in adjacency))
    while todo:
        best, best_fill = None, None
        for v in sorted(todo):
            neighbors = [w for w in adjacency[v] if w in adjacency]
            fill = sum(
                1
                for i, a in enumerate(neighbors)
                for b in neighbors[i + 1 :]
                if b not in adjacency[a]
            )
            if best is None or fill < best_fill:
                best, best_fill = v, fill
        neighbors = [w for w in adjacency[best] if w != best]
        for i, a in enumerate(neighbors):
            for b in neighbors[i + 1 :]:
                adjacency[a].add(b)
                adjacency[b].add(a)
        for w in neighbors:
            adjacency[w].discard(best)
        del adjacency[best]
        todo.discard(best)
        order.append(best)
    return order


def _eliminate_sum(
    factors: list[Factor], order: list[str]
) -> tuple[list[Factor], float]:
    """Sum-product elimination with per-step max rescaling; returns the
    remaining factors and the accumulated log scale."""
    log_scale = 0.0
    for var in order:
        involved = [f for f in factors if var in f.scope]
        if not involved:
            continue
        product = involved[0]
        for f in involved[1:]:
            product = product.multiply(f)
        summed = product.sum_out(var)
        peak = float(summed.values.max()) if summed.values.size else 0.0
        if peak == 0.0:
            raise ImpossibleEvidenceError("evidence has probability zero")
        summed = Factor(summed.scope, summed.values / peak)
        log_scale += math.log(peak)
        factors = [f for f in factors if var not in f.scope] + [summed]
    return factors, log_scale


def _reduced_factors(net: BayesianNetwork, ev_idx: dict[str, int], nodes) -> list[Factor]:
    factors = []
    for node in nodes:
        f = _cpt_factor(net, node)
        for var, state in ev_idx.items():
            if var in f.scope:
                f = f.reduce(var, state)
        factors.append(f)
    return factors


def evidence_probability(net: BayesianNetwork, ev: Evidence) -> float:
    """P(evidence); 0.0 when the evidence is impossible (never raises)."""
    ev_idx = _check_evidence(net, ev)
    nodes = _barren_pruned(net, set(ev_idx))
    factors = _reduced_factors(net, ev_idx, nodes)
    to_eliminate = {n for n in nodes if n not in ev_idx}
    order = _min_fill_order([f.scope for f in factors], to_eliminate)
    try:
        remaining, log_scale = _eliminate_sum(factors, order)
    except ImpossibleEvidenceError:
        return 0.0
    total = 1.0
    for f in remaining:
        total *= float(f.values.sum())
    if total == 0.0:
        return 0.0
    return math.exp(log_scale + math.log(total))


def posterior(net: BayesianNetwork, target: str, ev: Evidence) -> Posterior:
    """Exact P(target | evidence) by variable elimination."""
    variable = net.variable(target)
    ev_idx = _check_evidence(net, ev)
    if target in ev_idx:
        raise ContractError(f"target {target!r} cannot also be evidence")
    nodes = _barren_pruned(net, set(ev_idx) | {target})
    factors = _reduced_factors(net, ev_idx, nodes)
    to_eliminate = {n for n in nodes if n not in ev_idx and n != target}
    order = _min_fill_order([f.scope for f in factors], to_eliminate)
    remaining, log_scale = _eliminate_sum(factors, order)

    result = Factor((target,), np.ones(variable.cardinality))
    loose = 1.0
    for f in remaining:
        if f.scope:
            result = result.multiply(f)
        else:
            loose *= float(f.values)
    if set(result.scope) != {target}:
        raise AssertionError("elimination left unexpected scope")
    unnormalized = result._expand((target,)) * loose
    z = float(unnormalized.sum())
    if z <= 0.0:
        raise ImpossibleEvidenceError("evidence has probability zero")
    log_p = log_scale + math.log(z)
    return Posterior(
        target=target,
        states=variable.states,
        probabilities=tuple(float(p) for p in unnormalized / z),
        p_evidence=min(1.0, math.exp(log_p)),
        log_p_evidence=log_p,
    )


def mpe(net: BayesianNetwork, ev: Evidence) -> tuple[dict[str, str], float]:
    """Most probable complete assignment consistent with the evidence.

    Max-product elimination over every unobserved variable with argmax
    traceback; ties resolve toward the earliest-declared state. The
    returned probability is the joint probability of the assignment.
    """
    from .core import joint_probability

    ev_idx = _check_evidence(net, ev)
    nodes = list(net.node_names)
    factors = _reduced_factors(net, ev_idx, nodes)
    to_eliminate = {n for n in nodes if n not in ev_idx}
    order = _min_fill_order([f.scope for f in factors], to_eliminate)

    trace: list[tuple[str, Factor]] = []
    for var in order:
        involved = [f for f in factors if var in f.scope]
        if not involved:
            raise AssertionError(f"unobserved variable {var!r} appears in no factor")
        product = involved[0]
        for f in involved[1:]:
            product = product.multiply(f)
        trace.append((var, product))
        maxed, _ = product.max_out(var)
        peak = float(maxed.values.max()) if maxed.values.size else 0.0
        if peak == 0.0:
            raise ImpossibleEvidenceError("evidence has probability zero")
        maxed = Factor(maxed.scope, maxed.values / peak)
        factors = [f for f in factors if var not in f.scope] + [maxed]

    for f in factors:
        if f.scope:
            raise AssertionError("max-product elimination left unexpected scope")
        if float(f.values) == 0.0:
            raise ImpossibleEvidenceError("evidence has probability zero")

    assignment_idx: dict[str, int] = dict(ev_idx)
    for var, product in reversed(trace):
        reduced = product
        for other in product.scope:
            if other != var:
                reduced = reduced.reduce(other, assignment_idx[other])
        assignment_idx[var] = int(np.argmax(reduced.values))

    assignment = {
        name: net.variable(name).states[assignment_idx[name]] for name in net.node_names
    }
    return assignment, joint_probability(net, assignment)


def symmetrized_kl(p, q) -> float:
    """KL(p||q) + KL(q||p) in nats; zero iff the distributions match."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ContractError("distributions must share a support size")
    total = 0.0
    for a, b in zip(p.tolist(), q.tolist()):
        if a > 0.0:
            if b == 0.0:
                return math.inf
            total += a * math.log(a / b)
        if b > 0.0:
            if a == 0.0:
                return math.inf
            total += b * math.log(b / a)
    return total


@dataclass(frozen=True)
class ScanEntry:
    variable: str
    state: str
    posterior: Posterior
    divergence: float


@dataclass(frozen=True)
class ScanResult:
    target: str
    marginal: Posterior
    entries: tuple[ScanEntry, ...]
    impossible: tuple[tuple[str, str], ...]


def evidence_scan(net: BayesianNetwork, target: str) -> ScanResult:
    """Rank every single-variable observation by how far it moves the
    target's marginal (symmetrized KL), descending."""
    marginal = posterior(net, target, {})
    entries = []
    impossible = []
    for var in net.variables:
        if var.name == target:
            continue
        for state in var.states:
            try:
                post = posterior(net, target, {var.name: state})
            except ImpossibleEvidenceError:
                impossible.append((var.name, state))
                continue
            div = symmetrized_kl(post.probabilities, marginal.probabilities)
            entries.append(ScanEntry(var.name, state, post, div))
    entries.sort(key=lambda e: (-e.divergence, e.variable, e.state))
    return ScanResult(target, marginal, tuple(entries), tuple(impossible))


@dataclass(frozen=True)
class ScenarioResult:
    label: str
    evidence: Evidence
    posterior: Posterior


def scenario(net: BayesianNetwork, target: str, ev: Evidence, label: str = "") -> ScenarioResult:
    """Posterior under a named multi-variable evidence profile.

    On impossible evidence the error names each evidence item whose
    removal alone restores possibility (greedy one-out diagnostic).
    """
    try:
        post = posterior(net, target, ev)
    except ImpossibleEvidenceError:
        culprits = []
        for key in sorted(ev):
            rest = {k: v for k, v in ev.items() if k != key}
            if evidence_probability(net, rest) > 0.0:
                culprits.append(key)
        detail = (
            f"scenario {label!r}: evidence has probability zero; "
            + (
                f"removing any one of {culprits} restores possibility"
                if culprits
                else "no single evidence item is responsible"
            )
        )
        raise ImpossibleEvidenceError(detail, culprits) from None
    return ScenarioResult(label, dict(ev), post)


def run_scenarios(
    net: BayesianNetwork, target: str, scenarios: list[tuple[str, Evidence]]
) -> list[ScenarioResult]:
    return [scenario(net, target, ev, label) for label, ev in scenarios]
