from __future__ import annotations

import numpy as np
import pytest

from bnkit.core import BayesianNetwork, Cpt, Dag, DiscreteVariable


def random_network(
    rng: np.random.Generator,
    n_nodes: int | None = None,
    max_nodes: int = 10,
    max_states: int = 4,
    edge_prob: float = 0.35,
) -> BayesianNetwork:
    """Random DAG over a random topological order with Dirichlet CPT rows."""
    n = n_nodes if n_nodes is not None else int(rng.integers(2, max_nodes + 1))
    names = [f"V{i}" for i in range(n)]
    order = rng.permutation(n)
    arcs = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                arcs.add((names[order[i]], names[order[j]]))
    cards = {name: int(rng.integers(2, max_states + 1)) for name in names}
    variables = tuple(
        DiscreteVariable(name, tuple(f"s{k}" for k in range(cards[name])))
        for name in names
    )
    dag = Dag(tuple(names), frozenset(arcs))
    cpts = []
    for v in variables:
        parents = dag.parents_of(v.name)
        q = 1
        for p in parents:
            q *= cards[p]
        table = rng.dirichlet(np.ones(v.cardinality), size=q)
        cpts.append(
            Cpt(v.name, parents, tuple(cards[p] for p in parents), table)
        )
    return BayesianNetwork(variables, dag, tuple(cpts))


def chain_network(cards: list[int], stay: float = 0.9) -> BayesianNetwork:
    """V0 -> V1 -> ... chain; each node mostly copies its parent's state."""
    names = [f"V{i}" for i in range(len(cards))]
    variables = tuple(
        DiscreteVariable(n, tuple(f"s{k}" for k in range(c)))
        for n, c in zip(names, cards)
    )
    arcs = frozenset((names[i], names[i + 1]) for i in range(len(cards) - 1))
    dag = Dag(tuple(names), arcs)
    cpts = [Cpt(names[0], (), (), np.full((1, cards[0]), 1.0 / cards[0]))]
    for i in range(1, len(cards)):
        q, r = cards[i - 1], cards[i]
        table = np.full((q, r), (1.0 - stay) / (r - 1))
        for j in range(q):
            table[j, j % r] = stay
        table = table / table.sum(axis=1, keepdims=True)
        cpts.append(Cpt(names[i], (names[i - 1],), (q,), table))
    return BayesianNetwork(variables, dag, tuple(cpts))


def sample_dataset(net: BayesianNetwork, n: int, rng: np.random.Generator):
    """Ancestral sampling from a network into a Dataset."""
    from bnkit.core import topological_order
    from bnkit.data import Dataset

    names = list(net.node_names)
    col = {name: i for i, name in enumerate(names)}
    rows = np.zeros((n, len(names)), dtype=np.int64)
    for name in topological_order(net.dag):
        cpt = net.cpt(name)
        row_idx = np.zeros(n, dtype=np.int64)
        for parent in cpt.parents:
            row_idx = row_idx * net.variable(parent).cardinality + rows[:, col[parent]]
        cum = np.cumsum(cpt.table[row_idx], axis=1)
        u = rng.random(n)
        rows[:, col[name]] = (u[:, None] > cum).sum(axis=1)
    return Dataset(net.variables, rows)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)
