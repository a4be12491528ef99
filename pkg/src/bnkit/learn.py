"""Score-based structure learning and Bayesian parameter fitting.

Structure search maximizes the decomposable BIC score

    score(G) = sum_i [ sum_jk N_ijk * ln(N_ijk / N_ij) ] - (q_i (r_i - 1) / 2) * ln N

with Tabu search over single-arc moves, made robust by a nonparametric
bootstrap: the search is repeated on resampled datasets and only edges
appearing in at least a threshold fraction of replicates are kept.
Parameters are then fitted with a uniform Dirichlet prior,

    P(X_i = x_k | parents = j) = (N_ijk + alpha) / (N_ij + r_i * alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BayesianNetwork, Cpt, Dag, _toposort
from .data import Dataset
from .errors import ContractError, StructuralError


@dataclass(frozen=True)
class SufficientStats:
    """Contingency counts N_ijk for one variable given an ordered parent list."""

    variable: str
    parents: tuple[str, ...]
    counts: np.ndarray = field(repr=False)  # q x r, non-negative ints

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def q(self) -> int:
        return int(self.counts.shape[0])

    @property
    def r(self) -> int:
        return int(self.counts.shape[1])


@dataclass(frozen=True)
class Constraints:
    forbidden: frozenset[tuple[str, str]] = frozenset()
    required: frozenset[tuple[str, str]] = frozenset()
    no_outgoing: frozenset[str] = frozenset()


@dataclass(frozen=True)
class LearnConfig:
    tabu_tenure: int = 10
    max_non_improving: int = 100
    constraints: Constraints = field(default_factory=Constraints)
    seed: int = 0

    def __post_init__(self):
        if self.tabu_tenure < 1:
            raise ContractError("tabu tenure must be >= 1")
        if self.max_non_improving < 1:
            raise ContractError("non-improving cap must be >= 1")


def count_stats(data: Dataset, variable: str, parents) -> SufficientStats:
    """Exact contingency counts, rows indexed by the canonical
    parent-configuration rule (first parent most significant)."""
    parents = tuple(parents)
    names = data.names
    if variable not in names:
        raise ContractError(f"unknown column {variable!r}")
    for p in parents:
        if p not in names:
            raise ContractError(f"unknown column {p!r}")
    if variable in parents:
        raise ContractError(f"{variable!r} cannot be its own parent")
    r = data.variable(variable).cardinality
    cards = [data.variable(p).cardinality for p in parents]
    q = 1
    for c in cards:
        q *= c
    child = data.column(variable)
    cfg = np.zeros(data.n, dtype=np.int64)
    for p, card in zip(parents, cards):
        cfg = cfg * card + data.column(p)
    flat = np.bincount(cfg * r + child, minlength=q * r)
    return SufficientStats(variable, parents, flat.reshape(q, r))


def bic_family(stats: SufficientStats, n: int) -> float:
    """One node's BIC contribution: log-likelihood minus complexity.

    Zero counts contribute nothing to the likelihood; empty parent
    configurations still count toward the q_i (r_i - 1) / 2 penalty.
    """
    if n <= 0:
        raise ContractError("sample size must be positive")
    counts = stats.counts.astype(np.float64)
    row_sums = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(counts > 0, counts * np.log(counts / row_sums), 0.0)
    loglik = float(terms.sum())
    penalty = 0.5 * stats.q * (stats.r - 1) * math.log(n)
    return loglik - penalty


class FamilyScoreCache:
    """Memoized per-family BIC terms over one dataset.

    Parent lists are canonicalized to declaration order and totals are
    always re-summed from per-family terms in node order, so a delta
    update and a full rescore produce bit-identical floats.
    """

    def __init__(self, data: Dataset):
        self.data = data
        self._position = {name: i for i, name in enumerate(data.names)}
        self._memo: dict[tuple[str, tuple[str, ...]], float] = {}

    def family(self, variable: str, parents) -> float:
        key = (variable, tuple(sorted(parents, key=self._position.__getitem__)))
        if key not in self._memo:
            self._memo[key] = bic_family(count_stats(self.data, *key), self.data.n)
        return self._memo[key]

    def total(self, dag: Dag) -> float:
        return sum(self.family(node, dag.parents_of(node)) for node in dag.nodes)


def bic_score(dag: Dag, data: Dataset) -> float:
    """Network BIC score: the sum of family terms in node order."""
    if set(dag.nodes) != set(data.names):
        raise ContractError("DAG nodes must match dataset variables")
    return sum(
        bic_family(count_stats(data, node, dag.parents_of(node)), data.n)
        for node in dag.nodes
    )


def _creates_cycle(nodes, arcs: set[tuple[str, str]], candidate: tuple[str, str]) -> bool:
    """Would adding ``candidate`` close a directed cycle? True iff the
    child already reaches the parent."""
    parent, child = candidate
    children: dict[str, list[str]] = {n: [] for n in nodes}
    for p, c in arcs:
        children[p].append(c)
    stack, seen = [child], {child}
    while stack:
        node = stack.pop()
        if node == parent:
            return True
        for nxt in children[node]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


_MOVE_ORDER = {"add": 0, "delete": 1, "reverse": 2}


def _reversal(move: tuple[str, str, str]) -> tuple[str, str, str]:
    kind, parent, child = move
    if kind == "add":
        return ("delete", parent, child)
    if kind == "delete":
        return ("add", parent, child)
    return ("reverse", child, parent)


def tabu_search(data: Dataset, config: LearnConfig | None = None) -> Dag:
    """Tabu search over single-arc moves, starting from the empty graph.

    Each iteration applies the single best non-tabu move (add, delete,
    or reverse), even when it worsens the score; a move is tabu while
    its reversal was applied within the last ``tabu_tenure`` iterations,
    unless it beats the best score seen (aspiration). Search stops after
    ``max_non_improving`` consecutive moves without a new incumbent and
    returns the best DAG visited. Deterministic: candidate ties break
    lexicographically by (move kind, parent, child).
    """
    if data.n == 0:
        raise ContractError("cannot learn from an empty dataset")
    config = config or LearnConfig()
    cons = config.constraints
    nodes = data.names
    node_set = set(nodes)
    for p, c in cons.required | cons.forbidden:
        if p not in node_set or c not in node_set:
            raise ContractError(f"constraint arc {p}->{c} references unknown column")
    for p, c in cons.required:
        if p in cons.no_outgoing:
            raise ContractError(f"required arc {p}->{c} conflicts with no-outgoing set")
        if (p, c) in cons.forbidden:
            raise ContractError(f"arc {p}->{c} both required and forbidden")

    arcs: set[tuple[str, str]] = set(cons.required)
    try:
        _toposort(nodes, frozenset(arcs))
    except StructuralError:
        raise StructuralError("required arcs form a cycle") from None

    cache = FamilyScoreCache(data)

    def arc_allowed(parent: str, child: str) -> bool:
        return (
            parent != child
            and (parent, child) not in cons.forbidden
            and parent not in cons.no_outgoing
        )

    def candidate_moves():
        parents_map = {n: [p for p, c in arcs if c == n] for n in nodes}
        for parent in nodes:
            for child in nodes:
                if parent == child:
                    continue
                present = (parent, child) in arcs
                if not present and (child, parent) not in arcs:
                    if arc_allowed(parent, child) and not _creates_cycle(
                        nodes, arcs, (parent, child)
                    ):
                        delta = cache.family(
                            child, parents_map[child] + [parent]
                        ) - cache.family(child, parents_map[child])
                        yield ("add", parent, child), delta
                elif present:
                    if (parent, child) not in cons.required:
                        fewer = [p for p in parents_map[child] if p != parent]
                        delta = cache.family(child, fewer) - cache.family(
                            child, parents_map[child]
                        )
                        yield ("delete", parent, child), delta
                        if arc_allowed(child, parent):
                            without = arcs - {(parent, child)}
                            if not _creates_cycle(nodes, without, (child, parent)):
                                gain_parent = cache.family(
                                    parent, parents_map[parent] + [child]
                                ) - cache.family(parent, parents_map[parent])
                                yield ("reverse", parent, child), delta + gain_parent

    def apply(move: tuple[str, str, str]):
        kind, parent, child = move
        if kind == "add":
            arcs.add((parent, child))
        elif kind == "delete":
            arcs.discard((parent, child))
        else:
            arcs.discard((parent, child))
            arcs.add((child, parent))

    current_score = cache.total(Dag(nodes, frozenset(arcs)))
    best_score = current_score
    best_arcs = set(arcs)
    tabu_until: dict[tuple[str, str, str], int] = {}
    non_improving = 0
    iteration = 0

    while non_improving < config.max_non_improving:
        iteration += 1
        best_move = None
        best_delta = -math.inf
        for move, delta in candidate_moves():
            tabu = tabu_until.get(move, 0) >= iteration
            if tabu and current_score + delta <= best_score:
                continue  # aspiration only when strictly beating the incumbent
            if best_move is None or delta > best_delta or (
                delta == best_delta
                and (_MOVE_ORDER[move[0]], move[1], move[2])
                < (_MOVE_ORDER[best_move[0]], best_move[1], best_move[2])
            ):
                best_move, best_delta = move, delta
        if best_move is None:
            break
        apply(best_move)
        tabu_until[_reversal(best_move)] = iteration + config.tabu_tenure
        current_score = cache.total(Dag(nodes, frozenset(arcs)))
        if current_score > best_score:
            best_score = current_score
            best_arcs = set(arcs)
            non_improving = 0
        else:
            non_improving += 1

    return Dag(nodes, frozenset(best_arcs))


@dataclass(frozen=True)
class BootstrapResult:
    """Edge stability across bootstrap replicates plus the consensus DAG.

    ``edge_frequency`` maps unordered pairs (sorted tuples) to the
    fraction of replicates containing the edge in either direction;
    ``direction_counts`` tallies each orientation separately so the
    directed reading can be audited.
    """

    replicates: int
    edge_frequency: dict[tuple[str, str], float]
    direction_counts: dict[tuple[str, str], int]
    consensus: Dag

    def table_lines(self) -> list[str]:
        """Edge-frequency export: 'parent child frequency direction_fraction'."""
        lines = []
        for pair in sorted(self.edge_frequency):
            a, b = pair
            n_ab = self.direction_counts.get((a, b), 0)
            n_ba = self.direction_counts.get((b, a), 0)
            parent, child = (a, b) if n_ab >= n_ba else (b, a)
            total = n_ab + n_ba
            frac = (max(n_ab, n_ba) / total) if total else 0.0
            lines.append(
                f"{parent} {child} {self.edge_frequency[pair]!r} {frac!r}"
            )
        return lines


def break_cycles(
    nodes, arcs, strength: dict[tuple[str, str], float]
) -> Dag:
    """Delete the weakest arc of each directed cycle until none remain.

    Only arcs on a detected cycle are ever removed; ties on strength
    break lexicographically by arc.
    """
    nodes = tuple(nodes)
    working = set(tuple(a) for a in arcs)
    for arc in working:
        if arc not in strength:
            raise ContractError(f"no strength for arc {arc[0]}->{arc[1]}")

    def find_cycle() -> list[tuple[str, str]] | None:
        children: dict[str, list[str]] = {n: [] for n in nodes}
        for p, c in sorted(working):
            children[p].append(c)
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {n: WHITE for n in nodes}
        stack: list[str] = []

        def visit(node: str) -> list[tuple[str, str]] | None:
            color[node] = GRAY
            stack.append(node)
            for child in children[node]:
                if color[child] == GRAY:
                    i = stack.index(child)
                    cycle_nodes = stack[i:] + [child]
                    return list(zip(cycle_nodes, cycle_nodes[1:]))
                if color[child] == WHITE:
                    found = visit(child)
                    if found is not None:
                        return found
            stack.pop()
            color[node] = BLACK
            return None

        for n in nodes:
            if color[n] == WHITE:
                found = visit(n)
                if found is not None:
                    return found
        return None

    while True:
        cycle = find_cycle()
        if cycle is None:
            break
        weakest = min(cycle, key=lambda arc: (strength[arc], arc))
        working.discard(weakest)
    return Dag(nodes, frozenset(working))


def bootstrap_consensus(
    data: Dataset,
    b: int = 2000,
    threshold: float = 0.5,
    config: LearnConfig | None = None,
) -> BootstrapResult:
    """Bootstrap the structure search and keep the stable edges.

    Each replicate resamples N rows with replacement (replicate ``i``
    uses seed ``config.seed + i``) and reruns Tabu search. Pairs kept
    with frequency >= ``threshold`` are oriented by majority direction
    (ties toward the lexicographically smaller parent), then any cycles
    are broken by dropping the weakest arc, with the undirected
    frequency as the arc strength.
    """
    if b < 1:
        raise ContractError("need at least one bootstrap replicate")
    if not 0.0 < threshold <= 1.0:
        raise ContractError("threshold must be in (0, 1]")
    config = config or LearnConfig()

    pair_counts: dict[tuple[str, str], int] = {}
    direction_counts: dict[tuple[str, str], int] = {}
    for i in range(b):
        rng = np.random.default_rng(config.seed + i)
        sample_idx = rng.integers(0, data.n, size=data.n)
        sample = Dataset(data.variables, data.rows[sample_idx])
        learned = tabu_search(sample, config)
        for parent, child in learned.arcs:
            pair = tuple(sorted((parent, child)))
            pair_counts[pair] = pair_counts.get(pair, 0) + 1
            direction_counts[(parent, child)] = direction_counts.get((parent, child), 0) + 1

    edge_frequency = {pair: count / b for pair, count in pair_counts.items()}
    kept_arcs: set[tuple[str, str]] = set()
    strength: dict[tuple[str, str], float] = {}
    for pair, freq in edge_frequency.items():
        if freq < threshold:
            continue
        a, c = pair
        n_ac = direction_counts.get((a, c), 0)
        n_ca = direction_counts.get((c, a), 0)
        arc = (a, c) if n_ac >= n_ca else (c, a)
        kept_arcs.add(arc)
        strength[arc] = freq

    consensus = break_cycles(data.names, kept_arcs, strength)

    cons = config.constraints
    missing = [arc for arc in cons.required if arc not in consensus.arcs]
    if missing:
        raise StructuralError(
            f"required arcs {missing} lost while breaking consensus cycles"
        )
    offending = [a for a in consensus.arcs if a[0] in cons.no_outgoing]
    if offending:
        raise StructuralError(f"consensus violates no-outgoing set via {offending}")

    return BootstrapResult(
        replicates=b,
        edge_frequency=edge_frequency,
        direction_counts=direction_counts,
        consensus=consensus,
    )


def fit_parameters(dag: Dag, data: Dataset, alpha: float = 1.0) -> BayesianNetwork:
    """Dirichlet-smoothed CPT estimates: (N_ijk + a) / (N_ij + r_i a).

    Every entry is strictly positive, so unseen parent configurations
    get the uniform prior row.
    """
    if alpha <= 0:
        raise ContractError("alpha must be positive")
    if set(dag.nodes) != set(data.names):
        raise ContractError("DAG nodes must match dataset variables")
    variables = tuple(data.variable(n) for n in dag.nodes)
    cpts = []
    for node in dag.nodes:
        parents = dag.parents_of(node)
        stats = count_stats(data, node, parents)
        counts = stats.counts.astype(np.float64)
        r = stats.r
        table = (counts + alpha) / (counts.sum(axis=1, keepdims=True) + r * alpha)
        cpts.append(
            Cpt(
                node,
                parents,
                tuple(data.variable(p).cardinality for p in parents),
                table,
            )
        )
    return BayesianNetwork(variables, Dag(dag.nodes, dag.arcs), tuple(cpts))
