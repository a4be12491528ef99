import math

import numpy as np
import pytest

from bnkit.core import BayesianNetwork, Cpt, Dag, DiscreteVariable
from bnkit.errors import ContractError
from bnkit.infer import posterior
from bnkit.sensitivity import (
    ParameterHandle,
    arc_diameter,
    iter_handles,
    mutual_information,
    node_sensitivity,
    one_way_sensitivity,
    per_state_sobol,
    perturbed_network,
    sobol_index,
    tornado,
)

from conftest import chain_network, random_network, sample_dataset
from oracles import joint_table


def binary(name):
    return DiscreteVariable(name, ("s0", "s1"))


def copy_net(p0=0.5, noise=0.0):
    """T copies X with optional noise; D is disconnected."""
    vx, vt, vd = binary("X"), binary("T"), binary("D")
    dag = Dag(("X", "T", "D"), frozenset({("X", "T")}))
    cpts = (
        Cpt("X", (), (), np.array([[p0, 1 - p0]])),
        Cpt("T", ("X",), (2,), np.array([[1 - noise, noise], [noise, 1 - noise]])),
        Cpt("D", (), (), np.array([[0.5, 0.5]])),
    )
    return BayesianNetwork((vx, vt, vd), dag, cpts)


def entropy(dist):
    return -sum(p * math.log(p) for p in dist if p > 0)


def sobol_by_enumeration(net, x, target):
    """Variance-weighted first-order index from the enumerated joint."""
    names, columns, probs = joint_table(net)
    cx = net.variable(x).cardinality
    ct = net.variable(target).cardinality
    px = np.array([probs[columns[x] == i].sum() for i in range(cx)])
    pt = np.array([probs[columns[target] == j].sum() for j in range(ct)])
    explained, total = 0.0, float((pt * (1 - pt)).sum())
    for j in range(ct):
        cond = np.array(
            [
                probs[(columns[x] == i) & (columns[target] == j)].sum() / px[i]
                if px[i] > 0
                else pt[j]
                for i in range(cx)
            ]
        )
        explained += float((px * (cond - pt[j]) ** 2).sum())
    return explained / total


class TestMutualInformation:
    def test_d_separated_pair_is_zero(self):
        assert mutual_information(copy_net(), "D", "T") < 1e-12

    def test_deterministic_copy_of_uniform_is_ln2(self):
        assert mutual_information(copy_net(0.5), "X", "T") == pytest.approx(
            math.log(2), abs=1e-12
        )

    def test_symmetric(self, rng):
        for _ in range(5):
            net = random_network(rng, n_nodes=4, max_states=3)
            a, b = net.node_names[0], net.node_names[-1]
            assert mutual_information(net, a, b) == pytest.approx(
                mutual_information(net, b, a), abs=1e-12
            )

    def test_bounded_by_min_entropy(self, rng):
        for _ in range(8):
            net = random_network(rng, n_nodes=4, max_states=4)
            a, b = net.node_names[0], net.node_names[1]
            mi = mutual_information(net, a, b)
            ha = entropy(posterior(net, a, {}).probabilities)
            hb = entropy(posterior(net, b, {}).probabilities)
            assert mi <= min(ha, hb) + 1e-12


class TestSobolIndex:
    def test_independent_variable_scores_zero(self):
        assert sobol_index(copy_net(), "D", "T") == 0.0

    def test_deterministic_function_scores_one(self):
        assert sobol_index(copy_net(0.5), "X", "T") == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_target_rejected(self):
        vx, vt = binary("X"), binary("T")
        net = BayesianNetwork(
            (vx, vt),
            Dag(("X", "T"), frozenset()),
            (
                Cpt("X", (), (), np.array([[0.5, 0.5]])),
                Cpt("T", (), (), np.array([[1.0, 0.0]])),
            ),
        )
        with pytest.raises(ContractError, match="degenerate"):
            sobol_index(net, "X", "T")

    def test_matches_enumeration_oracle(self, rng):
        for _ in range(6):
            net = random_network(rng, n_nodes=5, max_states=3)
            x, t = net.node_names[0], net.node_names[-1]
            assert sobol_index(net, x, t) == pytest.approx(
                sobol_by_enumeration(net, x, t), abs=1e-10
            )

    def test_information_monotone_along_chains_from_target(self):
        # target at the chain head: each node's parent sits closer to the
        # target, so conditioning on the parent is never less informative
        net = chain_network([2, 2, 2, 2], stay=0.8)
        target = "V0"
        sobols = [sobol_index(net, f"V{i}", target) for i in (1, 2, 3)]
        assert sobols[0] >= sobols[1] >= sobols[2]
        mis = [mutual_information(net, f"V{i}", target) for i in (1, 2, 3)]
        assert mis[0] >= mis[1] >= mis[2]

    def test_zero_sets_of_mi_and_sobol_agree(self, rng):
        nets = [copy_net(), chain_network([2, 3, 2], stay=0.7)]
        nets += [random_network(rng, n_nodes=4, max_states=3) for _ in range(3)]
        for net in nets:
            target = net.node_names[-1]
            for x in net.node_names[:-1]:
                try:
                    s = sobol_index(net, x, target)
                except ContractError:
                    continue
                m = mutual_information(net, x, target)
                assert (m < 1e-12) == (s < 1e-12)

    def test_per_state_indices_exported(self):
        per_state = per_state_sobol(copy_net(0.5), "X", "T")
        assert set(per_state) == {"s0", "s1"}
        assert all(v == pytest.approx(1.0, abs=1e-12) for v in per_state.values())


class TestArcDiameter:
    def test_vacuous_parent_scores_zero(self):
        vx, vt = binary("X"), binary("T")
        net = BayesianNetwork(
            (vx, vt),
            Dag(("X", "T"), frozenset({("X", "T")})),
            (
                Cpt("X", (), (), np.array([[0.5, 0.5]])),
                Cpt("T", ("X",), (2,), np.array([[0.4, 0.6], [0.4, 0.6]])),
            ),
        )
        assert arc_diameter(net, ("X", "T")) == 0.0

    def test_deterministic_disjoint_rows_score_one(self):
        assert arc_diameter(copy_net(0.5, noise=0.0), ("X", "T")) == 1.0

    def test_tv_hand_value(self):
        assert arc_diameter(copy_net(0.5, noise=0.25), ("X", "T")) == pytest.approx(0.5)

    def test_maximizes_over_coparent_configurations(self):
        va, vb, vt = binary("A"), binary("B"), binary("T")
        dag = Dag(("A", "B", "T"), frozenset({("A", "T"), ("B", "T")}))
        # A matters only when B=s1 (rows: (A,B) configs in canonical order)
        table = np.array(
            [
                [0.5, 0.5],  # A=s0, B=s0
                [0.9, 0.1],  # A=s0, B=s1
                [0.5, 0.5],  # A=s1, B=s0
                [0.1, 0.9],  # A=s1, B=s1
            ]
        )
        net = BayesianNetwork(
            (va, vb, vt),
            dag,
            (
                Cpt("A", (), (), np.array([[0.5, 0.5]])),
                Cpt("B", (), (), np.array([[0.5, 0.5]])),
                Cpt("T", ("A", "B"), (2, 2), table),
            ),
        )
        assert arc_diameter(net, ("A", "T")) == pytest.approx(0.8)

    def test_invariant_to_parent_state_relabeling(self):
        vx = DiscreteVariable("X", ("u", "v", "w"))
        vt = binary("T")
        dag = Dag(("X", "T"), frozenset({("X", "T")}))
        rows = np.array([[0.9, 0.1], [0.5, 0.5], [0.2, 0.8]])
        net1 = BayesianNetwork(
            (vx, vt),
            dag,
            (
                Cpt("X", (), (), np.array([[0.2, 0.3, 0.5]])),
                Cpt("T", ("X",), (3,), rows),
            ),
        )
        perm = [2, 0, 1]
        net2 = BayesianNetwork(
            (DiscreteVariable("X", ("w", "u", "v")), vt),
            dag,
            (
                Cpt("X", (), (), np.array([[0.5, 0.2, 0.3]])),
                Cpt("T", ("X",), (3,), rows[perm]),
            ),
        )
        assert arc_diameter(net1, ("X", "T")) == arc_diameter(net2, ("X", "T"))

    def test_unknown_arc_rejected(self):
        with pytest.raises(ContractError):
            arc_diameter(copy_net(), ("D", "T"))


class TestOneWaySensitivity:
    def test_direct_parameter_is_identity_function(self):
        vx = binary("X")
        net = BayesianNetwork(
            (vx,), Dag(("X",), frozenset()), (Cpt("X", (), (), np.array([[0.3, 0.7]])),)
        )
        result = one_way_sensitivity(net, ParameterHandle("X", 0, 0), ("X", "s0"))
        fn = result.function
        assert (fn.a, fn.b, fn.c, fn.d) == (1.0, 0.0, 0.0, 1.0)
        assert result.low == pytest.approx(0.27)
        assert result.high == pytest.approx(0.33)

    def test_d_separated_parameter_is_flat(self):
        net = copy_net(0.4, noise=0.1)
        result = one_way_sensitivity(net, ParameterHandle("D", 0, 0), ("T", "s1"))
        assert result.width < 1e-12

    def test_baseline_reproduces_unperturbed_posterior(self, rng):
        for _ in range(5):
            net = random_network(rng, n_nodes=4, max_states=3)
            target = net.node_names[-1]
            state = net.variable(target).states[0]
            handles = [h for h in iter_handles(net, exclude=target)]
            h = handles[int(rng.integers(0, len(handles)))]
            result = one_way_sensitivity(net, h, (target, state))
            direct = posterior(net, target, {}).probabilities[0]
            assert result.baseline == pytest.approx(direct, abs=1e-12)

    def test_predicts_held_out_theta_evaluations(self, rng):
        for _ in range(6):
            net = random_network(rng, n_nodes=4, max_states=3)
            target = net.node_names[-1]
            state = net.variable(target).states[0]
            handles = [h for h in iter_handles(net, exclude=target)]
            h = handles[int(rng.integers(0, len(handles)))]
            ev_var = next(n for n in net.node_names if n not in (target, h.node))
            ev = {ev_var: net.variable(ev_var).states[0]}
            result = one_way_sensitivity(net, h, (target, state), ev)
            for theta in rng.uniform(0.02, 0.98, size=10):
                perturbed = perturbed_network(net, h, float(theta))
                direct = posterior(perturbed, target, ev).as_dict()[state]
                assert result.function(float(theta)) == pytest.approx(direct, abs=1e-9)

    def test_covariation_of_degenerate_row_goes_uniform(self):
        vx = DiscreteVariable("X", ("a", "b", "c"))
        net = BayesianNetwork(
            (vx,), Dag(("X",), frozenset()), (Cpt("X", (), (), np.array([[1.0, 0.0, 0.0]])),)
        )
        perturbed = perturbed_network(net, ParameterHandle("X", 0, 0), 0.4)
        assert perturbed.cpt("X").table[0] == pytest.approx([0.4, 0.3, 0.3])


class TestTornado:
    def test_ranking_and_consistency_with_individual_runs(self, rng):
        net = random_network(rng, n_nodes=4, max_states=3)
        target = net.node_names[-1]
        state = net.variable(target).states[0]
        report = tornado(net, (target, state), top_k=6)
        widths = [e.score for e in report.entries]
        assert widths == sorted(widths, reverse=True)
        for e in report.entries:
            h = ParameterHandle(e.extra["node"], e.extra["row"], e.extra["col"])
            again = one_way_sensitivity(net, h, (target, state))
            assert e.score == again.width

    def test_baseline_consistent_on_deterministic_network(self):
        net = chain_network([2, 2], stay=1.0)
        base = posterior(net, "V1", {}).probabilities[1]
        report = tornado(net, ("V1", "s1"), top_k=100)
        for e in report.entries:
            assert e.extra["baseline"] == pytest.approx(base, abs=1e-12)

    def test_top_k_limits_entries(self, rng):
        net = random_network(rng, n_nodes=3, max_states=2)
        target = net.node_names[0]
        state = net.variable(target).states[0]
        report = tornado(net, (target, state), top_k=1)
        assert len(report.entries) == 1


class TestNodeSensitivity:
    def test_target_absent_from_scores(self):
        scores = node_sensitivity(copy_net(0.4, noise=0.2), "T")
        assert "T" not in scores

    def test_d_separated_node_scores_zero(self):
        scores = node_sensitivity(copy_net(0.4, noise=0.2), "T")
        assert scores["D"] < 1e-12
        assert scores["X"] > 0.01

    def test_batched_scores_equal_per_handle_runs(self, rng):
        # the batched implementation must agree with naive per-(handle,
        # state) one-way calls
        net = random_network(rng, n_nodes=4, max_states=3, edge_prob=0.5)
        target = net.node_names[-1]
        batched = node_sensitivity(net, target)
        for node in net.node_names:
            if node == target:
                continue
            widest = 0.0
            cpt = net.cpt(node)
            for row in range(cpt.n_rows):
                for col in range(cpt.n_states):
                    for state in net.variable(target).states:
                        result = one_way_sensitivity(
                            net, ParameterHandle(node, row, col), (target, state)
                        )
                        widest = max(widest, result.width)
            assert batched[node] == pytest.approx(widest, abs=1e-12)

    def test_invariant_to_declaration_order(self, rng):
        net = random_network(rng, n_nodes=4, max_states=2, edge_prob=0.5)
        data = sample_dataset(net, 300, rng)
        from bnkit.learn import fit_parameters

        target = net.node_names[-1]
        fitted1 = fit_parameters(net.dag, data)
        order = list(net.node_names)[::-1]
        from bnkit.data import Dataset

        permuted_vars = tuple(data.variable(n) for n in order)
        col = {n: i for i, n in enumerate(data.names)}
        permuted = Dataset(permuted_vars, data.rows[:, [col[n] for n in order]])
        dag2 = Dag(tuple(order), net.dag.arcs)
        fitted2 = fit_parameters(dag2, permuted)
        s1 = node_sensitivity(fitted1, target)
        s2 = node_sensitivity(fitted2, target)
        assert set(s1) == set(s2)
        for node in s1:
            assert s1[node] == pytest.approx(s2[node], abs=1e-10)
