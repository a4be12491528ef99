"""Self-contained model persistence.

A bundle is one JSON document carrying everything needed to query the
model: variables with state order, DAG arcs, CPTs (row-major in the
canonical configuration order), frozen column encoders, bootstrap edge
frequencies, and provenance. Numbers serialize as shortest round-trip
decimal strings, so loading reproduces every CPT entry bit for bit and
bundles stay diff-able. Unknown top-level fields survive a round-trip.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .core import BayesianNetwork, Cpt, Dag, DiscreteVariable
from .data import BinEdges, ColumnCodec, ColumnSpec
from .errors import ContractError

SCHEMA_VERSION = 1

_KNOWN_KEYS = (
    "schema_version",
    "variables",
    "arcs",
    "cpts",
    "codecs",
    "edge_frequencies",
    "target",
    "provenance",
)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def build_timestamp() -> str:
    """ISO timestamp; honors SOURCE_DATE_EPOCH for reproducible outputs."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def codec_to_json(codec: ColumnCodec) -> dict:
    spec = codec.spec
    out = {
        "name": spec.name,
        "kind": spec.kind,
        "group": spec.group,
        "states": list(codec.states),
    }
    if codec.edges is not None:
        out["cuts"] = list(codec.edges.cuts)
        out["labels"] = list(codec.edges.labels)
    if spec.kind == "boolean":
        out["true_label"] = spec.true_label
        out["false_label"] = spec.false_label
    if spec.kind == "frequency_rank":
        out["rank_map"] = {k: codec.rank_map[k] for k in sorted(codec.rank_map)}
    return out


def codec_from_json(raw: dict) -> ColumnCodec:
    kind = raw["kind"]
    spec = ColumnSpec(
        name=raw["name"],
        kind=kind,
        k=len(raw.get("labels", [])) if kind == "quantile" else 0,
        labels=tuple(raw.get("labels", [])),
        states=tuple(raw["states"]) if kind == "categorical" else None,
        true_label=raw.get("true_label", "Yes"),
        false_label=raw.get("false_label", "No"),
        group=raw.get("group", "other"),
    )
    edges = None
    if "cuts" in raw:
        edges = BinEdges(raw["name"], tuple(raw["cuts"]), tuple(raw["labels"]))
    return ColumnCodec(
        spec, tuple(raw["states"]), edges=edges, rank_map=dict(raw.get("rank_map", {}))
    )


@dataclass(frozen=True)
class ModelBundle:
    variables: tuple[tuple[str, tuple[str, ...], str], ...]  # (name, states, group)
    arcs: tuple[tuple[str, str], ...]
    cpts: dict[str, dict]
    codecs: tuple[ColumnCodec, ...] = ()
    edge_frequencies: tuple[dict, ...] = ()
    target: str | None = None
    provenance: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_network(
        cls,
        net: BayesianNetwork,
        groups: dict[str, str] | None = None,
        codecs=(),
        edge_frequencies=(),
        target: str | None = None,
        provenance: dict | None = None,
    ) -> "ModelBundle":
        groups = groups or {}
        variables = tuple(
            (v.name, v.states, groups.get(v.name, "other")) for v in net.variables
        )
        cpts = {
            c.variable: {
                "parents": list(c.parents),
                "table": [[float(x) for x in row] for row in c.table],
            }
            for c in net.cpts
        }
        provenance = dict(provenance or {})
        if "config_hash" not in provenance:
            provenance["config_hash"] = content_hash(
                {
                    "variables": [[n, list(s)] for n, s, _ in variables],
                    "arcs": sorted(list(a) for a in net.dag.arcs),
                    "cpts": cpts,
                }
            )
        provenance.setdefault("created", build_timestamp())
        return cls(
            variables=variables,
            arcs=tuple(sorted(net.dag.arcs)),
            cpts=cpts,
            codecs=tuple(codecs),
            edge_frequencies=tuple(edge_frequencies),
            target=target,
            provenance=provenance,
        )

    @property
    def config_hash(self) -> str:
        return self.provenance.get("config_hash", "")

    def group_of(self, name: str) -> str:
        for n, _, g in self.variables:
            if n == name:
                return g
        raise ContractError(f"unknown variable {name!r}")

    def arc_strength(self, parent: str, child: str) -> float | None:
        key = tuple(sorted((parent, child)))
        for row in self.edge_frequencies:
            if tuple(sorted((row["a"], row["b"]))) == key:
                return float(row["frequency"])
        return None

    def to_network(self) -> BayesianNetwork:
        variables = tuple(DiscreteVariable(n, tuple(s)) for n, s, _ in self.variables)
        by_name = {v.name: v for v in variables}
        dag = Dag(tuple(v.name for v in variables), frozenset(self.arcs))
        cpts = []
        for v in variables:
            raw = self.cpts[v.name]
            parents = tuple(raw["parents"])
            cards = tuple(by_name[p].cardinality for p in parents)
            cpts.append(Cpt(v.name, parents, cards, np.asarray(raw["table"])))
        return BayesianNetwork(variables, dag, tuple(cpts))

    def to_json_obj(self) -> dict:
        obj = {
            "schema_version": self.schema_version,
            "variables": [
                {"name": n, "states": list(s), "group": g} for n, s, g in self.variables
            ],
            "arcs": [list(a) for a in self.arcs],
            "cpts": {name: self.cpts[name] for name in sorted(self.cpts)},
            "codecs": [codec_to_json(c) for c in self.codecs],
            "edge_frequencies": list(self.edge_frequencies),
            "target": self.target,
            "provenance": self.provenance,
        }
        for key in sorted(self.extra):
            obj[key] = self.extra[key]
        return obj

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_obj(), fh, indent=2, ensure_ascii=False)
            fh.write("\n")

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ModelBundle":
        version = obj.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ContractError(f"unsupported bundle schema version {version!r}")
        variables = tuple(
            (v["name"], tuple(v["states"]), v.get("group", "other"))
            for v in obj["variables"]
        )
        extra = {k: v for k, v in obj.items() if k not in _KNOWN_KEYS}
        return cls(
            variables=variables,
            arcs=tuple(tuple(a) for a in obj["arcs"]),
            cpts=obj["cpts"],
            codecs=tuple(codec_from_json(c) for c in obj.get("codecs", [])),
            edge_frequencies=tuple(obj.get("edge_frequencies", [])),
            target=obj.get("target"),
            provenance=dict(obj.get("provenance", {})),
            extra=extra,
        )

    @classmethod
    def load(cls, path) -> "ModelBundle":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_obj(json.load(fh))
