import math

import numpy as np
import pytest

from bnkit.core import BayesianNetwork, Cpt, Dag, DiscreteVariable, joint_probability
from bnkit.errors import ContractError, ImpossibleEvidenceError
from bnkit.infer import (
    evidence_probability,
    evidence_scan,
    mpe,
    posterior,
    run_scenarios,
    scenario,
    symmetrized_kl,
)

from conftest import chain_network, random_network
from oracles import joint_table, mpe_by_enumeration, posterior_by_enumeration


def binary(name, states=("s0", "s1")):
    return DiscreteVariable(name, states)


def random_evidence(net, rng, max_items=3):
    names = list(net.node_names)
    rng.shuffle(names)
    count = int(rng.integers(0, min(max_items, len(names) - 1) + 1))
    return {
        name: net.variable(name).states[rng.integers(0, net.variable(name).cardinality)]
        for name in names[:count]
    }


class TestPosterior:
    def test_root_marginal_is_its_cpt_row(self):
        net = chain_network([2, 3], stay=0.75)
        post = posterior(net, "V0", {})
        assert post.probabilities == (0.5, 0.5)
        assert post.p_evidence == 1.0

    def test_chain_bayes_inversion_matches_enumeration(self):
        net = chain_network([2, 2], stay=0.8)
        post = posterior(net, "V0", {"V1": "s1"})
        expected, p_ev = posterior_by_enumeration(net, "V0", {"V1": "s1"})
        assert post.probabilities == pytest.approx(expected, abs=1e-14)
        assert post.p_evidence == pytest.approx(p_ev, abs=1e-14)

    def test_matches_enumeration_on_random_networks(self, rng):
        for _ in range(25):
            net = random_network(rng, max_nodes=6, max_states=4)
            target = net.node_names[int(rng.integers(0, len(net.node_names)))]
            ev = random_evidence(net, rng)
            ev.pop(target, None)
            post = posterior(net, target, ev)
            expected, p_ev = posterior_by_enumeration(net, target, ev)
            tv = 0.5 * np.abs(np.asarray(post.probabilities) - expected).sum()
            assert tv < 1e-10
            assert post.p_evidence == pytest.approx(p_ev, rel=1e-10)

    def test_markov_blanket_screens_off_distant_evidence(self, rng):
        # E -> P -> T -> C <- S: the blanket of T is {P, C, S}
        names = ("E", "P", "T", "C", "S")
        cards = {"E": 2, "P": 3, "T": 2, "C": 3, "S": 2}
        variables = tuple(
            DiscreteVariable(n, tuple(f"s{k}" for k in range(cards[n]))) for n in names
        )
        dag = Dag(names, frozenset({("E", "P"), ("P", "T"), ("T", "C"), ("S", "C")}))
        cpts = []
        for v in variables:
            parents = dag.parents_of(v.name)
            q = int(np.prod([cards[p] for p in parents])) if parents else 1
            table = rng.dirichlet(np.ones(cards[v.name]), size=q)
            cpts.append(Cpt(v.name, parents, tuple(cards[p] for p in parents), table))
        net = BayesianNetwork(variables, dag, tuple(cpts))

        blanket = {"P": "s1", "C": "s2", "S": "s0"}
        with_extra = dict(blanket, E="s1")
        p_blanket = posterior(net, "T", blanket).probabilities
        p_extra = posterior(net, "T", with_extra).probabilities
        assert p_blanket == pytest.approx(p_extra, abs=1e-12)

    def test_evidence_probability_equals_summed_joint(self, rng):
        for _ in range(10):
            net = random_network(rng, max_nodes=5, max_states=3)
            ev = random_evidence(net, rng)
            _, columns, probs = joint_table(net)
            mask = np.ones(probs.size, dtype=bool)
            for var, state in ev.items():
                mask &= columns[var] == net.variable(var).state_index(state)
            assert evidence_probability(net, ev) == pytest.approx(
                float(probs[mask].sum()), rel=1e-10
            )

    def test_impossible_evidence_is_an_error(self):
        # deterministic chain: V0=s1 forces V1=s1, so V1=s0 cannot co-occur
        net = chain_network([2, 2, 2], stay=1.0)
        with pytest.raises(ImpossibleEvidenceError):
            posterior(net, "V2", {"V0": "s1", "V1": "s0"})

    def test_target_in_evidence_rejected(self):
        net = chain_network([2, 2])
        with pytest.raises(ContractError):
            posterior(net, "V0", {"V0": "s0"})


class TestMpe:
    def test_deterministic_chain_is_forced_by_root_evidence(self):
        net = chain_network([2, 2, 2], stay=1.0)
        assignment, prob = mpe(net, {"V0": "s1"})
        assert assignment == {"V0": "s1", "V1": "s1", "V2": "s1"}
        assert prob == pytest.approx(0.5)

    def test_independent_nodes_factorize_to_per_node_argmax(self):
        va, vb = binary("A"), binary("B")
        net = BayesianNetwork(
            (va, vb),
            Dag(("A", "B"), frozenset()),
            (
                Cpt("A", (), (), np.array([[0.3, 0.7]])),
                Cpt("B", (), (), np.array([[0.9, 0.1]])),
            ),
        )
        assignment, prob = mpe(net, {})
        assert assignment == {"A": "s1", "B": "s0"}
        assert prob == pytest.approx(0.63)

    def test_matches_exhaustive_argmax_on_random_networks(self, rng):
        for _ in range(20):
            net = random_network(rng, n_nodes=6, max_states=4)
            ev = random_evidence(net, rng)
            assignment, prob = mpe(net, ev)
            oracle_assignment, oracle_prob = mpe_by_enumeration(net, ev)
            assert prob == pytest.approx(oracle_prob, rel=1e-12)
            assert assignment == oracle_assignment
            assert prob == pytest.approx(joint_probability(net, assignment), rel=1e-15)

    def test_beats_random_completions(self, rng):
        net = random_network(rng, n_nodes=7, max_states=3)
        ev = random_evidence(net, rng, max_items=2)
        _, prob = mpe(net, ev)
        free = [n for n in net.node_names if n not in ev]
        for _ in range(1_000):
            candidate = dict(ev)
            for name in free:
                states = net.variable(name).states
                candidate[name] = states[rng.integers(0, len(states))]
            assert prob >= joint_probability(net, candidate) - 1e-15

    def test_impossible_evidence_raises(self):
        net = chain_network([2, 2], stay=1.0)
        with pytest.raises(ImpossibleEvidenceError):
            mpe(net, {"V0": "s0", "V1": "s1"})


class TestSymmetrizedKl:
    def test_identity_is_zero(self):
        assert symmetrized_kl((0.3, 0.7), (0.3, 0.7)) == 0.0

    def test_hand_value(self):
        assert symmetrized_kl((0.75, 0.25), (0.25, 0.75)) == pytest.approx(
            math.log(3.0), abs=1e-12
        )

    def test_symmetric_in_arguments(self, rng):
        for _ in range(20):
            p = rng.dirichlet(np.ones(4))
            q = rng.dirichlet(np.ones(4))
            assert symmetrized_kl(p, q) == pytest.approx(symmetrized_kl(q, p), rel=1e-12)

    def test_support_mismatch_rejected(self):
        with pytest.raises(ContractError):
            symmetrized_kl((0.5, 0.5), (0.3, 0.3, 0.4))

    def test_disjoint_support_is_infinite(self):
        assert symmetrized_kl((1.0, 0.0), (0.0, 1.0)) == math.inf


class TestEvidenceScan:
    def make_net(self, rng):
        # P is T's sole, nearly deterministic parent; X is disconnected
        vp, vt, vx = binary("P"), binary("T"), binary("X")
        dag = Dag(("P", "T", "X"), frozenset({("P", "T")}))
        cpts = (
            Cpt("P", (), (), np.array([[0.6, 0.4]])),
            Cpt("T", ("P",), (2,), np.array([[0.98, 0.02], [0.02, 0.98]])),
            Cpt("X", (), (), np.array([[0.5, 0.5]])),
        )
        return BayesianNetwork((vp, vt, vx), dag, cpts)

    def test_d_separated_variable_has_zero_divergence(self, rng):
        net = self.make_net(rng)
        result = evidence_scan(net, "T")
        x_entries = [e for e in result.entries if e.variable == "X"]
        assert all(e.divergence < 1e-12 for e in x_entries)
        assert {e.variable for e in result.entries[-2:]} == {"X"}

    def test_sole_parent_occupies_top_ranks(self, rng):
        net = self.make_net(rng)
        result = evidence_scan(net, "T")
        assert {e.variable for e in result.entries[:2]} == {"P"}

    def test_row_count_is_total_states_of_other_variables(self, rng):
        net = self.make_net(rng)
        result = evidence_scan(net, "T")
        assert len(result.entries) + len(result.impossible) == 4

    def test_sorted_descending(self, rng):
        net = random_network(rng, n_nodes=5, max_states=3)
        result = evidence_scan(net, net.node_names[0])
        divergences = [e.divergence for e in result.entries]
        assert divergences == sorted(divergences, reverse=True)

    def test_impossible_pairs_excluded_and_reported(self):
        # root state s1 has probability zero, so observing it is impossible
        vr, vt = binary("R"), binary("T")
        net = BayesianNetwork(
            (vr, vt),
            Dag(("R", "T"), frozenset({("R", "T")})),
            (
                Cpt("R", (), (), np.array([[1.0, 0.0]])),
                Cpt("T", ("R",), (2,), np.array([[0.7, 0.3], [0.5, 0.5]])),
            ),
        )
        result = evidence_scan(net, "T")
        assert ("R", "s1") in result.impossible
        assert all((e.variable, e.state) != ("R", "s1") for e in result.entries)
        assert len(result.entries) + len(result.impossible) == 2


class TestScenario:
    def test_empty_evidence_gives_marginal(self):
        net = chain_network([2, 2], stay=0.8)
        result = scenario(net, "V1", {}, label="baseline")
        assert result.posterior.probabilities == posterior(net, "V1", {}).probabilities

    def test_contradictory_evidence_names_culprits(self):
        # deterministic chain: V0=s0 forces V2=s0, so {V0=s0, V2=s1} conflicts
        net3 = chain_network([2, 2, 2], stay=1.0)
        with pytest.raises(ImpossibleEvidenceError) as exc_info:
            scenario(net3, "V1", {"V0": "s0", "V2": "s1"}, label="conflict")
        assert sorted(exc_info.value.culprits) == ["V0", "V2"]

    def test_batch_returns_one_result_per_scenario(self):
        net = chain_network([2, 2], stay=0.8)
        scenarios = [(f"sc{i}", {"V0": "s0"} if i % 2 else {}) for i in range(7)]
        results = run_scenarios(net, "V1", scenarios)
        assert len(results) == 7
        assert [r.label for r in results] == [f"sc{i}" for i in range(7)]
        for r in results:
            assert sum(r.posterior.probabilities) == pytest.approx(1.0, abs=1e-9)
