"""Feature-influence analyses over a fitted network.

Four complementary views:

* mutual information between a variable and the target (nats),
* a first-order variance-based index of how much observing a variable
  explains the target's state probabilities,
* diameter-based arc strength: the worst-case total variation distance
  between a child's conditional distributions across one parent's
  states,
* one-way parameter sensitivity with proportional covariation, plus the
  tornado ranking and per-node aggregation built on it.

Any query probability is a ratio of two affine functions of a single
CPT entry under proportional covariation, so the full perturbation
curve is identified exactly from three evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BayesianNetwork, Cpt, parent_config_decode
from .errors import ContractError, ImpossibleEvidenceError
from .infer import Evidence, posterior


@dataclass(frozen=True)
class ParameterHandle:
    """Address of one CPT entry: node, parent-configuration row, state column."""

    node: str
    row: int
    col: int

    def describe(self, net: BayesianNetwork) -> str:
        cpt = net.cpt(self.node)
        state = net.variable(self.node).states[self.col]
        if not cpt.parents:
            return f"P({self.node}={state})"
        config = parent_config_decode(cpt, self.row)
        given = ", ".join(
            f"{p}={net.variable(p).states[config[p]]}" for p in cpt.parents
        )
        return f"P({self.node}={state} | {given})"

    def value(self, net: BayesianNetwork) -> float:
        return float(net.cpt(self.node).table[self.row, self.col])


@dataclass(frozen=True)
class ReportEntry:
    subject: str
    score: float
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SensitivityReport:
    kind: str  # mi | sobol | arc_diameter | tornado | node_color
    target: str
    target_state: str | None
    entries: tuple[ReportEntry, ...]


def mutual_information(net: BayesianNetwork, x: str, target: str) -> float:
    """Mutual information (nats) from the exact joint of x and target."""
    if x == target:
        raise ContractError("mutual information needs two distinct variables")
    px = posterior(net, x, {}).probabilities
    pt = posterior(net, target, {}).probabilities
    x_states = net.variable(x).states
    mi = 0.0
    for i, state in enumerate(x_states):
        if px[i] == 0.0:
            continue
        conditional = posterior(net, target, {x: state}).probabilities
        for j, pj in enumerate(conditional):
            joint = px[i] * pj
            if joint > 0.0:
                mi += joint * math.log(joint / (px[i] * pt[j]))
    return max(0.0, mi)


def sobol_index(net: BayesianNetwork, x: str, target: str) -> float:
    """First-order variance-based index of x on the target, in [0, 1].

    Per target state t the index is Var_x(P(t|x)) / (P(t)(1-P(t)));
    states are aggregated weighted by their variance P(t)(1-P(t)), which
    pins the two anchor cases: 0 under independence, 1 when the target
    is a function of x.
    """
    if x == target:
        raise ContractError("index needs two distinct variables")
    px = np.asarray(posterior(net, x, {}).probabilities)
    pt = np.asarray(posterior(net, target, {}).probabilities)
    total_var = float((pt * (1.0 - pt)).sum())
    if total_var <= 0.0:
        raise ContractError(f"target {target!r} is degenerate (point mass)")
    x_states = net.variable(x).states
    conditionals = np.zeros((len(x_states), len(pt)))
    for i, state in enumerate(x_states):
        if px[i] > 0.0:
            conditionals[i] = posterior(net, target, {x: state}).probabilities
        else:
            conditionals[i] = pt
    explained = 0.0
    for j in range(len(pt)):
        explained += float((px * (conditionals[:, j] - pt[j]) ** 2).sum())
    return min(1.0, max(0.0, explained / total_var))


def per_state_sobol(net: BayesianNetwork, x: str, target: str) -> dict[str, float]:
    """The un-aggregated per-target-state indices, for auditability."""
    px = np.asarray(posterior(net, x, {}).probabilities)
    pt = np.asarray(posterior(net, target, {}).probabilities)
    x_states = net.variable(x).states
    t_states = net.variable(target).states
    conditionals = np.zeros((len(x_states), len(pt)))
    for i, state in enumerate(x_states):
        conditionals[i] = (
            posterior(net, target, {x: state}).probabilities if px[i] > 0 else pt
        )
    out = {}
    for j, t_state in enumerate(t_states):
        denom = pt[j] * (1.0 - pt[j])
        var = float((px * (conditionals[:, j] - pt[j]) ** 2).sum())
        out[t_state] = var / denom if denom > 0 else 0.0
    return out


def arc_diameter(net: BayesianNetwork, arc: tuple[str, str]) -> float:
    """Worst-case total variation distance a parent exerts on its child.

    Maximum over co-parent configurations of the maximum TV distance
    between the child's conditionals for any two states of the parent.
    """
    parent, child = arc
    if arc not in net.dag.arcs:
        raise ContractError(f"arc {parent}->{child} not in the network")
    cpt = net.cpt(child)
    axis = cpt.parents.index(parent)
    cards = cpt.parent_cards
    r_parent = cards[axis]
    table = cpt.table.reshape(cards + (cpt.n_states,))
    moved = np.moveaxis(table, axis, 0)  # parent states first
    flat = moved.reshape(r_parent, -1, cpt.n_states)  # co-parent configs in the middle
    worst = 0.0
    for cfg in range(flat.shape[1]):
        rows = flat[:, cfg, :]
        for i in range(r_parent):
            for j in range(i + 1, r_parent):
                tv = 0.5 * float(np.abs(rows[i] - rows[j]).sum())
                worst = max(worst, tv)
    return worst


@dataclass(frozen=True)
class RationalLinear:
    """P(event | evidence) as a function of one CPT entry: (a*t + b) / (c*t + d)."""

    a: float
    b: float
    c: float
    d: float

    def __call__(self, theta: float) -> float:
        num = self.a * theta + self.b
        den = self.c * theta + self.d
        if den == 0.0:
            if self.c != 0.0:
                return self.a / self.c  # removable 0/0 at an endpoint
            raise ImpossibleEvidenceError("evidence has probability zero throughout")
        return num / den


@dataclass(frozen=True)
class OneWayResult:
    handle: ParameterHandle
    theta0: float
    function: RationalLinear
    window: tuple[float, float]
    low: float
    high: float

    @property
    def width(self) -> float:
        return self.high - self.low

    @property
    def baseline(self) -> float:
        return self.function(self.theta0)


def perturbed_network(net: BayesianNetwork, h: ParameterHandle, theta: float) -> BayesianNetwork:
    """Copy of the network with one CPT entry moved to ``theta`` and the
    rest of its row covaried proportionally (to uniform if the entry
    held all the mass)."""
    if not 0.0 <= theta <= 1.0:
        raise ContractError("theta must lie in [0, 1]")
    cpt = net.cpt(h.node)
    if not (0 <= h.row < cpt.n_rows and 0 <= h.col < cpt.n_states):
        raise ContractError(f"handle addresses no CPT entry of {h.node!r}")
    theta0 = float(cpt.table[h.row, h.col])
    row = cpt.table[h.row].copy()
    if theta0 >= 1.0:
        row[:] = (1.0 - theta) / (cpt.n_states - 1)
    else:
        row *= (1.0 - theta) / (1.0 - theta0)
    np.clip(row, 0.0, 1.0, out=row)  # scaling can overshoot by an ulp
    row[h.col] = theta
    table = cpt.table.copy()
    table[h.row] = row
    new_cpt = Cpt(cpt.variable, cpt.parents, cpt.parent_cards, table)
    cpts = tuple(new_cpt if c.variable == h.node else c for c in net.cpts)
    return BayesianNetwork(net.variables, net.dag, cpts)


def _event_curves(
    net: BayesianNetwork, h: ParameterHandle, target: str, ev: Evidence
) -> tuple[dict[str, RationalLinear], float]:
    """Rational-linear curves of P(target = t | ev) in the handle's entry,
    one per target state, plus the handle's current value.

    The joint and evidence probabilities are both affine in the entry
    under proportional covariation; three evaluations (at 0, 1/2 and 1)
    pin the coefficients, with the midpoint acting as an exactness
    check. One elimination per evaluation covers every target state.
    """
    if target in ev:
        raise ContractError(f"event variable {target!r} cannot also be evidence")
    theta0 = h.value(net)
    states = net.variable(target).states

    def measure(theta: float) -> tuple[dict[str, float], float]:
        candidate = perturbed_network(net, h, theta)
        try:
            post = posterior(candidate, target, ev)
        except ImpossibleEvidenceError:
            return {state: 0.0 for state in states}, 0.0
        z = post.p_evidence
        return {state: p * z for state, p in post.as_dict().items()}, z

    n0, d0 = measure(0.0)
    n1, d1 = measure(1.0)
    n_mid, d_mid = measure(0.5)
    if abs(d_mid - (d0 + d1) / 2.0) > 1e-9 * max(1.0, abs(d_mid)):
        raise AssertionError("evidence probability is not affine in the perturbed entry")
    curves = {}
    for state in states:
        fn = RationalLinear(a=n1[state] - n0[state], b=n0[state], c=d1 - d0, d=d0)
        if abs(n_mid[state] - (fn.a * 0.5 + fn.b)) > 1e-9 * max(1.0, abs(n_mid[state])):
            raise AssertionError("event probability is not affine in the perturbed entry")
        curves[state] = fn
    return curves, theta0


def _window_range(
    fn: RationalLinear, theta0: float, window: float
) -> tuple[tuple[float, float], float, float]:
    lo = max(0.0, theta0 * (1.0 - window))
    hi = min(1.0, theta0 * (1.0 + window))
    if fn.c * lo + fn.d == 0.0 and fn.c * hi + fn.d == 0.0:
        raise ImpossibleEvidenceError("evidence has probability zero throughout the window")
    v_lo, v_hi = fn(lo), fn(hi)
    return (lo, hi), min(v_lo, v_hi), max(v_lo, v_hi)


def one_way_sensitivity(
    net: BayesianNetwork,
    h: ParameterHandle,
    event: tuple[str, str],
    ev: Evidence | None = None,
    window: float = 0.10,
) -> OneWayResult:
    """Identify P(event | ev) as an exact rational-linear function of one
    CPT entry and bound it over a relative perturbation window."""
    ev = dict(ev or {})
    target, state = event
    net.variable(target).state_index(state)
    curves, theta0 = _event_curves(net, h, target, ev)
    fn = curves[state]
    bounds, low, high = _window_range(fn, theta0, window)
    return OneWayResult(
        handle=h,
        theta0=theta0,
        function=fn,
        window=bounds,
        low=low,
        high=high,
    )


def iter_handles(net: BayesianNetwork, exclude: str | None = None):
    for cpt in net.cpts:
        if cpt.variable == exclude:
            continue
        for row in range(cpt.n_rows):
            for col in range(cpt.n_states):
                yield ParameterHandle(cpt.variable, row, col)


def tornado(
    net: BayesianNetwork,
    event: tuple[str, str],
    ev: Evidence | None = None,
    top_k: int = 10,
    window: float = 0.10,
) -> SensitivityReport:
    """Rank every CPT entry of every non-target node by how far a
    windowed perturbation can move P(event | ev)."""
    if top_k < 1:
        raise ContractError("top_k must be >= 1")
    target, state = event
    results = []
    for h in iter_handles(net, exclude=target):
        try:
            results.append(one_way_sensitivity(net, h, event, ev, window))
        except ImpossibleEvidenceError:
            continue
    results.sort(key=lambda r: (-r.width, r.handle.node, r.handle.row, r.handle.col))
    entries = tuple(
        ReportEntry(
            subject=r.handle.describe(net),
            score=r.width,
            extra={
                "node": r.handle.node,
                "row": r.handle.row,
                "col": r.handle.col,
                "theta0": r.theta0,
                "low": r.low,
                "high": r.high,
                "baseline": r.baseline,
            },
        )
        for r in results[:top_k]
    )
    return SensitivityReport("tornado", target, state, entries)


def node_sensitivity(
    net: BayesianNetwork,
    target: str,
    ev: Evidence | None = None,
    window: float = 0.10,
) -> dict[str, float]:
    """Per-node influence score for graph coloring: the widest one-way
    range over the node's CPT entries and all target states. The target
    itself is absent from the result."""
    ev = dict(ev or {})
    scores: dict[str, float] = {}
    for node in net.node_names:
        if node == target:
            continue
        widest = 0.0
        cpt = net.cpt(node)
        for row in range(cpt.n_rows):
            for col in range(cpt.n_states):
                handle = ParameterHandle(node, row, col)
                try:
                    curves, theta0 = _event_curves(net, handle, target, ev)
                except ImpossibleEvidenceError:
                    continue
                for fn in curves.values():
                    try:
                        _, low, high = _window_range(fn, theta0, window)
                    except ImpossibleEvidenceError:
                        continue
                    widest = max(widest, high - low)
        scores[node] = widest
    return scores


def mi_report(net: BayesianNetwork, target: str) -> SensitivityReport:
    entries = sorted(
        (
            ReportEntry(name, mutual_information(net, name, target))
            for name in net.node_names
            if name != target
        ),
        key=lambda e: (-e.score, e.subject),
    )
    return SensitivityReport("mi", target, None, tuple(entries))


def sobol_report(net: BayesianNetwork, target: str) -> SensitivityReport:
    entries = sorted(
        (
            ReportEntry(
                name,
                sobol_index(net, name, target),
                extra={"per_state": per_state_sobol(net, name, target)},
            )
            for name in net.node_names
            if name != target
        ),
        key=lambda e: (-e.score, e.subject),
    )
    return SensitivityReport("sobol", target, None, tuple(entries))


def arc_report(net: BayesianNetwork, target: str | None = None) -> SensitivityReport:
    entries = sorted(
        (
            ReportEntry(f"{p}->{c}", arc_diameter(net, (p, c)), extra={"parent": p, "child": c})
            for p, c in sorted(net.dag.arcs)
        ),
        key=lambda e: (-e.score, e.subject),
    )
    return SensitivityReport("arc_diameter", target or "", None, tuple(entries))


def node_color_report(
    net: BayesianNetwork, target: str, ev: Evidence | None = None
) -> SensitivityReport:
    scores = node_sensitivity(net, target, ev)
    entries = sorted(
        (ReportEntry(node, score) for node, score in scores.items()),
        key=lambda e: (-e.score, e.subject),
    )
    return SensitivityReport("node_color", target, None, tuple(entries))
