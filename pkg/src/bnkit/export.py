"""Graph exports of a fitted model: DOT and a JSON node/edge list.

Nodes carry their variable group (and sensitivity scores when
requested); arcs carry the bootstrap edge frequency. Output ordering is
fixed (declaration order for nodes, sorted arcs), so re-exporting the
same bundle is byte-identical.
"""

from __future__ import annotations

import json

from .bundle import ModelBundle

GROUP_COLORS = {
    "structural": "#f2d750",
    "spatial": "#7fbf7f",
    "amenity": "#7fa8d9",
    "target": "#e89bc2",
    "other": "#cccccc",
}


def _node_rows(bundle: ModelBundle, scores: dict[str, float] | None):
    for name, _, group in bundle.variables:
        row = {"id": name, "group": group}
        if scores is not None and name in scores:
            row["sensitivity"] = scores[name]
        yield row


def _edge_rows(bundle: ModelBundle):
    for parent, child in sorted(bundle.arcs):
        row = {"from": parent, "to": child}
        strength = bundle.arc_strength(parent, child)
        if strength is not None:
            row["strength"] = strength
        yield row


def to_graph_json(bundle: ModelBundle, scores: dict[str, float] | None = None) -> str:
    obj = {
        "config_hash": bundle.config_hash,
        "nodes": list(_node_rows(bundle, scores)),
        "edges": list(_edge_rows(bundle)),
    }
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def to_graph_dot(bundle: ModelBundle, scores: dict[str, float] | None = None) -> str:
    lines = ["digraph model {", "  rankdir=LR;"]
    for row in _node_rows(bundle, scores):
        attrs = [
            f'group="{row["group"]}"',
            f'fillcolor="{GROUP_COLORS.get(row["group"], GROUP_COLORS["other"])}"',
            'style="filled"',
        ]
        if "sensitivity" in row:
            attrs.append(f'sensitivity="{row["sensitivity"]!r}"')
        lines.append(f'  "{row["id"]}" [{", ".join(attrs)}];')
    for row in _edge_rows(bundle):
        attrs = []
        if "strength" in row:
            attrs.append(f'strength="{row["strength"]!r}"')
            attrs.append(f'label="{row["strength"]:.2f}"')
        suffix = f' [{", ".join(attrs)}]' if attrs else ""
        lines.append(f'  "{row["from"]}" -> "{row["to"]}"{suffix};')
    lines.append("}")
    return "\n".join(lines) + "\n"
