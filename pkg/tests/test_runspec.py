import json

import pytest

from bnkit.errors import RunSpecError
from bnkit.runspec import (
    DEFAULT_REPLICATES,
    DEFAULT_THRESHOLD,
    load_runspec,
    load_scenarios,
    parse_runspec,
)


def minimal_spec(**overrides) -> dict:
    spec = {
        "input": {"path": "data.csv"},
        "columns": [
            {"name": "PRICE", "rule": "quantile", "k": 2, "labels": ["lo", "hi"], "group": "target"},
            {"name": "AC", "rule": "boolean", "group": "amenity"},
        ],
    }
    spec.update(overrides)
    return spec


class TestDefaults:
    def test_bootstrap_defaults(self):
        spec = parse_runspec(minimal_spec())
        assert spec.replicates == DEFAULT_REPLICATES == 2000
        assert spec.threshold == DEFAULT_THRESHOLD == 0.5

    def test_learn_defaults(self):
        spec = parse_runspec(minimal_spec())
        assert spec.learn_config.tabu_tenure == 10
        assert spec.learn_config.max_non_improving == 100
        assert spec.learn_config.seed == 0

    def test_iqr_default_factor(self):
        spec = parse_runspec(minimal_spec())
        assert spec.discretization.iqr_factor == 2.0

    def test_target_inferred_from_no_outgoing(self):
        spec = parse_runspec(
            minimal_spec(constraints={"no_outgoing": ["PRICE"]})
        )
        assert spec.target == "PRICE"

    def test_groups_carried_through(self):
        spec = parse_runspec(minimal_spec())
        assert spec.groups() == {"PRICE": "target", "AC": "amenity"}


class TestValidation:
    def test_schema_violation_names_the_path(self):
        bad = minimal_spec()
        bad["columns"][0]["rule"] = "nope"
        with pytest.raises(RunSpecError, match="columns.0.rule"):
            parse_runspec(bad)

    def test_quantile_needs_k_and_labels(self):
        bad = minimal_spec()
        del bad["columns"][0]["labels"]
        with pytest.raises(RunSpecError, match="PRICE"):
            parse_runspec(bad)

    def test_label_count_must_match_k(self):
        bad = minimal_spec()
        bad["columns"][0]["labels"] = ["a", "b", "c"]
        with pytest.raises(RunSpecError, match="PRICE"):
            parse_runspec(bad)

    def test_constraints_must_reference_declared_columns(self):
        with pytest.raises(RunSpecError, match="GHOST"):
            parse_runspec(minimal_spec(constraints={"no_outgoing": ["GHOST"]}))
        with pytest.raises(RunSpecError, match="GHOST"):
            parse_runspec(minimal_spec(constraints={"forbidden": [["GHOST", "AC"]]}))

    def test_unknown_target_rejected(self):
        with pytest.raises(RunSpecError, match="target"):
            parse_runspec(minimal_spec(target="GHOST"))

    def test_unknown_top_level_keys_rejected(self):
        with pytest.raises(RunSpecError):
            parse_runspec(minimal_spec(surprise=1))

    def test_not_json_error_names_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(RunSpecError, match="broken.json"):
            load_runspec(path)


class TestConfigHash:
    def test_stable_for_identical_content(self):
        assert parse_runspec(minimal_spec()).config_hash == parse_runspec(minimal_spec()).config_hash

    def test_changes_with_content(self):
        a = parse_runspec(minimal_spec())
        b = parse_runspec(minimal_spec(learn={"seed": 9}))
        assert a.config_hash != b.config_hash


class TestScenarioFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "scen.json"
        path.write_text(json.dumps({
            "scenarios": [{"label": "L", "evidence": {"AC": "Yes"}}]
        }))
        assert load_scenarios(path) == [("L", {"AC": "Yes"})]

    def test_missing_scenarios_key(self, tmp_path):
        path = tmp_path / "scen.json"
        path.write_text(json.dumps({"items": []}))
        with pytest.raises(RunSpecError, match="scenarios"):
            load_scenarios(path)

    def test_entry_without_evidence(self, tmp_path):
        path = tmp_path / "scen.json"
        path.write_text(json.dumps({"scenarios": [{"label": "x"}]}))
        with pytest.raises(RunSpecError, match="#0"):
            load_scenarios(path)
