"""Run-spec files: the single configuration document driving a run.

A run spec names the input data, the per-column discretization rules,
row filters, structure-learning constraints and hyperparameters, the
bootstrap settings, the query target, and named scenarios. Files are
JSON and validate against the published schema
(``bnkit/schemas/runspec.schema.json``) before any computation starts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from .bundle import content_hash
from .data import ColumnSpec, DiscretizationSpec, RowFilter, DEFAULT_MISSING_TOKENS
from .errors import RunSpecError
from .learn import Constraints, LearnConfig

DEFAULT_REPLICATES = 2000
DEFAULT_THRESHOLD = 0.5


def schema() -> dict:
    text = resources.files("bnkit.schemas").joinpath("runspec.schema.json").read_text()
    return json.loads(text)


@dataclass(frozen=True)
class RunSpec:
    input_path: str
    delimiter: str
    missing_tokens: frozenset[str]
    discretization: DiscretizationSpec
    learn_config: LearnConfig
    replicates: int
    threshold: float
    target: str | None
    scenarios: tuple[tuple[str, dict[str, str]], ...]
    config_hash: str
    raw: dict = field(repr=False, default_factory=dict)

    def groups(self) -> dict[str, str]:
        return {c.name: c.group for c in self.discretization.columns}


def _column_spec(raw: dict) -> ColumnSpec:
    rule = raw["rule"]
    name = raw["name"]
    if rule == "quantile":
        if "k" not in raw or "labels" not in raw:
            raise RunSpecError(f"column {name!r}: quantile rule needs 'k' and 'labels'")
        if len(raw["labels"]) != raw["k"]:
            raise RunSpecError(
                f"column {name!r}: {len(raw['labels'])} labels for k={raw['k']}"
            )
    return ColumnSpec(
        name=name,
        kind=rule,
        k=raw.get("k", 0),
        labels=tuple(raw.get("labels", [])),
        states=tuple(raw["states"]) if "states" in raw else None,
        true_label=raw.get("true_label", "Yes"),
        false_label=raw.get("false_label", "No"),
        group=raw.get("group", "other"),
    )


def parse_runspec(obj: dict) -> RunSpec:
    try:
        jsonschema.validate(obj, schema())
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise RunSpecError(f"run spec invalid at {path}: {exc.message}") from None

    columns = tuple(_column_spec(c) for c in obj["columns"])
    names = {c.name for c in columns}
    filters = tuple(
        RowFilter(
            column=f["column"],
            min=f.get("min"),
            max=f.get("max"),
            allowed=tuple(f["allowed"]) if "allowed" in f else None,
            max_column=f.get("max_column"),
        )
        for f in obj.get("row_filters", [])
    )
    iqr = obj.get("iqr", {})
    discretization = DiscretizationSpec(
        columns=columns,
        iqr_factor=iqr.get("factor", 2.0),
        iqr_columns=tuple(iqr["columns"]) if iqr.get("columns") else None,
        dedup_keys=tuple(obj.get("dedup_keys", [])),
        row_filters=filters,
    )

    cons_raw = obj.get("constraints", {})
    for arc in list(cons_raw.get("forbidden", [])) + list(cons_raw.get("required", [])):
        for endpoint in arc:
            if endpoint not in names:
                raise RunSpecError(f"constraint references unknown column {endpoint!r}")
    for node in cons_raw.get("no_outgoing", []):
        if node not in names:
            raise RunSpecError(f"no-outgoing set references unknown column {node!r}")
    constraints = Constraints(
        forbidden=frozenset(tuple(a) for a in cons_raw.get("forbidden", [])),
        required=frozenset(tuple(a) for a in cons_raw.get("required", [])),
        no_outgoing=frozenset(cons_raw.get("no_outgoing", [])),
    )
    learn_raw = obj.get("learn", {})
    learn_config = LearnConfig(
        tabu_tenure=learn_raw.get("tabu_tenure", 10),
        max_non_improving=learn_raw.get("max_non_improving", 100),
        constraints=constraints,
        seed=learn_raw.get("seed", 0),
    )
    bootstrap = obj.get("bootstrap", {})

    target = obj.get("target")
    if target is None and constraints.no_outgoing:
        target = sorted(constraints.no_outgoing)[0]
    if target is not None and target not in names:
        raise RunSpecError(f"target {target!r} is not a declared column")

    scenarios = tuple(
        (s["label"], dict(s["evidence"])) for s in obj.get("scenarios", [])
    )

    tokens = obj.get("input", {}).get("missing_tokens")
    return RunSpec(
        input_path=obj["input"]["path"],
        delimiter=obj["input"].get("delimiter", ","),
        missing_tokens=frozenset(tokens) if tokens is not None else DEFAULT_MISSING_TOKENS,
        discretization=discretization,
        learn_config=learn_config,
        replicates=bootstrap.get("replicates", DEFAULT_REPLICATES),
        threshold=bootstrap.get("threshold", DEFAULT_THRESHOLD),
        target=target,
        scenarios=scenarios,
        config_hash=content_hash(obj),
        raw=obj,
    )


def load_runspec(path) -> RunSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RunSpecError(f"{path}: not valid JSON ({exc})") from None
    return parse_runspec(obj)


def load_scenarios(path) -> list[tuple[str, dict[str, str]]]:
    """Scenario file: {"scenarios": [{"label": ..., "evidence": {...}}]}."""
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RunSpecError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(obj, dict) or "scenarios" not in obj:
        raise RunSpecError(f"{path}: expected an object with a 'scenarios' list")
    out = []
    for i, s in enumerate(obj["scenarios"]):
        if not isinstance(s, dict) or "label" not in s or "evidence" not in s:
            raise RunSpecError(f"{path}: scenario #{i} needs 'label' and 'evidence'")
        if not isinstance(s["evidence"], dict):
            raise RunSpecError(f"{path}: scenario {s.get('label')!r} evidence must be a map")
        out.append((str(s["label"]), {str(k): str(v) for k, v in s["evidence"].items()}))
    return out
