"""Command-line surface.

Subcommands cover the whole pipeline: ``enrich`` (spatial features),
``discretize`` (cleaning + binning), ``learn`` (bootstrap consensus +
parameter fit), the query family (``query``, ``mpe``, ``scan``,
``scenario``, ``sensitivity``), ``export`` (graph files) and ``serve``
(HTTP API). Exit codes: 0 success, 1 usage or validation errors, 2
impossible evidence.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import demo
from .bundle import ModelBundle, build_timestamp
from .core import DiscreteVariable
from .data import Dataset, encode_dataset, read_csv
from .errors import (
    ContractError,
    DiscretizationError,
    ImpossibleEvidenceError,
    RunSpecError,
    StructuralError,
)
from .export import to_graph_dot, to_graph_json
from .infer import evidence_scan, mpe, scenario
from .learn import bootstrap_consensus, fit_parameters
from .runspec import load_runspec, load_scenarios
from .sensitivity import (
    arc_report,
    mi_report,
    node_color_report,
    node_sensitivity,
    sobol_report,
    tornado,
)
from .spatial import (
    GeoPoint,
    haversine,
    load_features,
    nearest_centroid,
    point_in_polygon,
    point_to_polyline_distance,
)

USAGE_EXIT = 1
IMPOSSIBLE_EXIT = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is reserved for
    # impossible evidence here
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _parse_evidence(pairs: list[str] | None) -> dict[str, str]:
    evidence: dict[str, str] = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ContractError(f"evidence must look like VAR=STATE, got {pair!r}")
        var, state = pair.split("=", 1)
        if var in evidence:
            raise ContractError(f"duplicate evidence for variable {var!r}")
        evidence[var] = state
    return evidence


def _resolve(base_file: str, path: str) -> str:
    if os.path.isabs(path):
        return path
    return os.path.join(os.path.dirname(os.path.abspath(base_file)), path)


def _print_posterior(post):
    print("state\tprobability")
    for state, p in zip(post.states, post.probabilities):
        print(f"{state}\t{p!r}")
    print(f"p_evidence\t{post.p_evidence!r}")


# ---------------------------------------------------------------- enrich


def cmd_enrich(args) -> int:
    features = load_features(args.features)
    table = read_csv(args.input, delimiter=args.delimiter)
    lat_i = table.column_index(args.lat)
    lon_i = table.column_index(args.lon)

    new_columns: list[str] = []
    if not args.no_distances:
        new_columns.extend(sorted(features.polylines))
        new_columns.extend(sorted(features.points))
    if features.centroids is not None:
        new_columns.append(args.nbhd_column)
    for name in new_columns:
        if name in table.columns:
            raise ContractError(f"enriched column {name!r} already exists in the input")

    boundary = None
    if args.boundary:
        if args.boundary not in features.polygons:
            raise ContractError(
                f"no polygon named {args.boundary!r} in {args.features}; "
                f"available: {sorted(features.polygons)}"
            )
        boundary = features.polygons[args.boundary]

    kept, dropped, bad_coords = [], 0, 0
    for row in table.rows:
        try:
            point = GeoPoint(float(row[lat_i]), float(row[lon_i]))
        except (TypeError, ValueError, ContractError):
            bad_coords += 1
            continue
        if boundary is not None and not point_in_polygon(point, boundary):
            dropped += 1
            continue
        extras = []
        if not args.no_distances:
            for name in sorted(features.polylines):
                extras.append(repr(point_to_polyline_distance(point, features.polylines[name])))
            for name in sorted(features.points):
                extras.append(repr(haversine(point, features.points[name])))
        if features.centroids is not None:
            extras.append(nearest_centroid(point, features.centroids))
        kept.append([("" if c is None else c) for c in row] + extras)

    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(table.columns) + new_columns)
        writer.writerows(kept)
    print(f"rows read:             {table.n_rows}")
    print(f"dropped bad coordinates: {bad_coords}")
    print(f"dropped outside boundary: {dropped}")
    print(f"rows written:          {len(kept)}")
    print(f"wrote {args.out}")
    return 0


# ------------------------------------------------------------ discretize


def cmd_discretize(args) -> int:
    spec = load_runspec(args.spec)
    input_path = _resolve(args.spec, spec.input_path)
    table = read_csv(input_path, delimiter=spec.delimiter, missing_tokens=spec.missing_tokens)
    result = encode_dataset(table, spec.discretization)

    os.makedirs(args.workdir, exist_ok=True)
    encoded_path = os.path.join(args.workdir, "encoded.csv")
    encoding_path = os.path.join(args.workdir, "encoding.json")

    dataset = result.dataset
    with open(encoded_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(dataset.names)
        for row in dataset.rows:
            writer.writerow([v.states[s] for v, s in zip(dataset.variables, row)])

    from .bundle import codec_to_json

    encoding = {
        "variables": [
            {"name": v.name, "states": list(v.states), "group": spec.groups()[v.name]}
            for v in dataset.variables
        ],
        "codecs": [codec_to_json(c) for c in result.codecs],
        "report": result.report.__dict__,
        "config_hash": spec.config_hash,
    }
    with open(encoding_path, "w", encoding="utf-8") as fh:
        json.dump(encoding, fh, indent=2, ensure_ascii=False)
        fh.write("\n")

    print("cleaning report")
    for line in result.report.lines():
        print("  " + line)
    print(f"wrote {encoded_path}")
    print(f"wrote {encoding_path}")
    return 0


# ----------------------------------------------------------------- learn


def _load_encoded(workdir: str) -> tuple[Dataset, dict]:
    encoding_path = os.path.join(workdir, "encoding.json")
    encoded_path = os.path.join(workdir, "encoded.csv")
    with open(encoding_path, encoding="utf-8") as fh:
        encoding = json.load(fh)
    variables = tuple(
        DiscreteVariable(v["name"], tuple(v["states"])) for v in encoding["variables"]
    )
    index_of = [
        {state: i for i, state in enumerate(v.states)} for v in variables
    ]
    rows = []
    with open(encoded_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != tuple(v.name for v in variables):
            raise ContractError("encoded.csv header does not match encoding.json")
        for raw in reader:
            rows.append([index_of[j][cell] for j, cell in enumerate(raw)])
    dataset = Dataset(variables, np.asarray(rows, dtype=np.int64).reshape(len(rows), len(variables)))
    return dataset, encoding


def cmd_learn(args) -> int:
    spec = load_runspec(args.spec)
    dataset, encoding = _load_encoded(args.workdir)

    # surface constraint conflicts before any compute
    from .core import Dag

    try:
        Dag(dataset.names, frozenset(spec.learn_config.constraints.required))
    except StructuralError:
        raise StructuralError("required arcs form a cycle") from None

    result = bootstrap_consensus(
        dataset, b=spec.replicates, threshold=spec.threshold, config=spec.learn_config
    )
    net = fit_parameters(result.consensus, dataset, alpha=1.0)

    edge_frequencies = []
    for pair in sorted(result.edge_frequency):
        a, b = pair
        n_ab = result.direction_counts.get((a, b), 0)
        n_ba = result.direction_counts.get((b, a), 0)
        parent, child = (a, b) if n_ab >= n_ba else (b, a)
        total = n_ab + n_ba
        edge_frequencies.append(
            {
                "a": pair[0],
                "b": pair[1],
                "frequency": result.edge_frequency[pair],
                "parent": parent,
                "child": child,
                "direction_fraction": (max(n_ab, n_ba) / total) if total else 0.0,
            }
        )

    from .bundle import codec_from_json

    bundle = ModelBundle.from_network(
        net,
        groups={v["name"]: v.get("group", "other") for v in encoding["variables"]},
        codecs=tuple(codec_from_json(c) for c in encoding["codecs"]),
        edge_frequencies=tuple(edge_frequencies),
        target=spec.target,
        provenance={
            "seed": spec.learn_config.seed,
            "config_hash": spec.config_hash,
            "created": build_timestamp(),
            "replicates": spec.replicates,
            "threshold": spec.threshold,
        },
    )
    bundle_path = args.bundle or os.path.join(args.workdir, "model.json")
    bundle.save(bundle_path)

    freq_path = os.path.join(args.workdir, "edge_frequencies.txt")
    with open(freq_path, "w", encoding="utf-8") as fh:
        for line in result.table_lines():
            fh.write(line + "\n")

    print(f"replicates: {result.replicates}")
    print(f"consensus arcs: {len(net.dag.arcs)}")
    for parent, child in sorted(net.dag.arcs):
        freq = result.edge_frequency[tuple(sorted((parent, child)))]
        print(f"  {parent} -> {child}\t{freq!r}")
    print(f"wrote {bundle_path}")
    print(f"wrote {freq_path}")
    return 0


# ----------------------------------------------------------------- query


def cmd_query(args) -> int:
    net = ModelBundle.load(args.bundle).to_network()
    evidence = _parse_evidence(args.evidence)
    result = scenario(net, args.target, evidence, label="query")
    print(f"target: {args.target}")
    _print_posterior(result.posterior)
    return 0


def cmd_mpe(args) -> int:
    net = ModelBundle.load(args.bundle).to_network()
    evidence = _parse_evidence(args.evidence)
    assignment, probability = mpe(net, evidence)
    print("variable\tstate")
    for name in net.node_names:
        print(f"{name}\t{assignment[name]}")
    print(f"probability\t{probability!r}")
    return 0


def cmd_scan(args) -> int:
    net = ModelBundle.load(args.bundle).to_network()
    result = evidence_scan(net, args.target)
    entries = result.entries if args.top == 0 else result.entries[: args.top]
    header = ["variable", "state", "divergence"] + [
        f"p({args.target}={s})" for s in result.marginal.states
    ]
    print("\t".join(header))
    for entry in entries:
        row = [entry.variable, entry.state, repr(entry.divergence)]
        row += [repr(p) for p in entry.posterior.probabilities]
        print("\t".join(row))
    for variable, state in result.impossible:
        print(f"# impossible evidence: {variable}={state}")
    return 0


def cmd_scenario(args) -> int:
    net = ModelBundle.load(args.bundle).to_network()
    scenarios = load_scenarios(args.scenarios)
    any_impossible = False
    for label, evidence in scenarios:
        print(f"scenario: {label}")
        for var in sorted(evidence):
            print(f"  {var} = {evidence[var]}")
        try:
            result = scenario(net, args.target, evidence, label=label)
        except ImpossibleEvidenceError as exc:
            any_impossible = True
            print(f"impossible evidence: {exc}")
            if exc.culprits:
                print(f"culprits: {', '.join(exc.culprits)}")
            print()
            continue
        _print_posterior(result.posterior)
        print()
    return IMPOSSIBLE_EXIT if any_impossible else 0


# ----------------------------------------------------------- sensitivity


def cmd_sensitivity(args) -> int:
    bundle = ModelBundle.load(args.bundle)
    net = bundle.to_network()
    target = args.target or bundle.target
    if not target:
        raise ContractError("no target given and the bundle does not name one")
    scale = 100.0 if args.x100 else 1.0
    evidence = _parse_evidence(args.evidence)

    if args.kind == "mi":
        report = mi_report(net, target)
        print("variable\tmi" + ("_x100" if args.x100 else "_nats"))
        for e in report.entries:
            print(f"{e.subject}\t{e.score * scale!r}")
    elif args.kind == "sobol":
        report = sobol_report(net, target)
        print("variable\tsobol" + ("_x100" if args.x100 else ""))
        for e in report.entries:
            print(f"{e.subject}\t{e.score * scale!r}")
    elif args.kind == "arc":
        report = arc_report(net, target)
        print("parent\tchild\tdiameter")
        for e in report.entries:
            print(f"{e.extra['parent']}\t{e.extra['child']}\t{e.score!r}")
    elif args.kind == "tornado":
        if not args.state:
            raise ContractError("tornado needs --state (the target state of interest)")
        report = tornado(net, (target, args.state), evidence, top_k=args.top_k, window=args.window)
        print("parameter\twidth\tlow\thigh\tbaseline")
        for e in report.entries:
            print(
                f"{e.subject}\t{e.score!r}\t{e.extra['low']!r}\t"
                f"{e.extra['high']!r}\t{e.extra['baseline']!r}"
            )
    elif args.kind == "nodes":
        report = node_color_report(net, target, evidence)
        print("node\tscore")
        for e in report.entries:
            print(f"{e.subject}\t{e.score!r}")
    else:  # pragma: no cover - argparse restricts choices
        raise ContractError(f"unknown sensitivity kind {args.kind!r}")
    return 0


# ---------------------------------------------------------------- export


def cmd_export(args) -> int:
    bundle = ModelBundle.load(args.bundle)
    scores = None
    if args.with_sensitivity:
        net = bundle.to_network()
        target = args.with_sensitivity
        scores = node_sensitivity(net, target)
    text = (
        to_graph_dot(bundle, scores)
        if args.format == "graph-dot"
        else to_graph_json(bundle, scores)
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {args.out}")
    return 0


# ----------------------------------------------------------------- serve


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(ModelBundle.load(args.bundle), ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# ------------------------------------------------------------------ demo


def cmd_make_demo(args) -> int:
    paths = demo.write_demo_files(
        args.out, n=args.rows, seed=args.seed, replicates=args.replicates
    )
    for key in sorted(paths):
        print(f"wrote {paths[key]}")
    return 0


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bnkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enrich", help="append spatial feature columns to a listings CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--features", required=True, help="geo feature file (JSON)")
    p.add_argument("--out", required=True)
    p.add_argument("--lat", default="lat")
    p.add_argument("--lon", default="lon")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--boundary", default=None, help="drop rows outside this named polygon")
    p.add_argument("--nbhd-column", default="NBHD")
    p.add_argument("--no-distances", action="store_true")
    p.set_defaults(func=cmd_enrich)

    p = sub.add_parser("discretize", help="clean and discretize the input table")
    p.add_argument("--spec", required=True)
    p.add_argument("--workdir", required=True)
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("learn", help="bootstrap consensus structure + Dirichlet fit")
    p.add_argument("--spec", required=True)
    p.add_argument("--workdir", required=True)
    p.add_argument("--bundle", default=None, help="output path (default workdir/model.json)")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("query", help="posterior of a target under evidence")
    p.add_argument("--bundle", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("-e", "--evidence", action="append", metavar="VAR=STATE")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("mpe", help="most probable explanation under evidence")
    p.add_argument("--bundle", required=True)
    p.add_argument("-e", "--evidence", action="append", metavar="VAR=STATE")
    p.set_defaults(func=cmd_mpe)

    p = sub.add_parser("scan", help="rank single observations by posterior shift")
    p.add_argument("--bundle", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--top", type=int, default=10, help="rows to print (0 = all)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("scenario", help="posteriors for a scenario file")
    p.add_argument("--bundle", required=True)
    p.add_argument("--scenarios", required=True)
    p.add_argument("--target", required=True)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("sensitivity", help="influence analyses")
    p.add_argument("--bundle", required=True)
    p.add_argument("--kind", required=True, choices=["mi", "sobol", "arc", "tornado", "nodes"])
    p.add_argument("--target", default=None)
    p.add_argument("--state", default=None)
    p.add_argument("-e", "--evidence", action="append", metavar="VAR=STATE")
    p.add_argument("--window", type=float, default=0.10)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--x100", action="store_true", help="report scores x100")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("export", help="graph export with node/edge attributes")
    p.add_argument("--bundle", required=True)
    p.add_argument("--format", required=True, choices=["graph-dot", "graph-json"])
    p.add_argument("--out", required=True)
    p.add_argument("--with-sensitivity", default=None, metavar="TARGET",
                   help="annotate nodes with sensitivity scores for this target")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="HTTP inference service")
    p.add_argument("--bundle", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--ui", default=None, metavar="DIR",
                   help="also serve the explorer UI from this directory")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("make-demo", help="write a synthetic city fixture")
    p.add_argument("--out", required=True)
    p.add_argument("--rows", type=int, default=1500)
    p.add_argument("--seed", type=int, default=20180101)
    p.add_argument("--replicates", type=int, default=40)
    p.set_defaults(func=cmd_make_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or 0
    except ImpossibleEvidenceError as exc:
        print(f"impossible evidence: {exc}", file=sys.stderr)
        return IMPOSSIBLE_EXIT
    except (
        ContractError,
        StructuralError,
        DiscretizationError,
        RunSpecError,
        FileNotFoundError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    raise SystemExit(main())
