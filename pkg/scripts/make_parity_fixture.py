#!/usr/bin/env python3
"""Build the frontend parity fixture: recorded service payloads plus the
digits the CLI prints for the same queries.

The frontend test suite replays these payloads through its rendering
path and asserts the displayed strings match the CLI output digit for
digit (the UI must never reformat a probability).
"""

import argparse
import contextlib
import io
import json
import os
import tempfile

import numpy as np
from fastapi.testclient import TestClient

from bnkit import demo
from bnkit.bundle import ModelBundle
from bnkit.cli import main as bnkit
from bnkit.service import create_app


def cli_query_digits(bundle_path: str, target: str, evidence: dict) -> dict:
    argv = ["query", "--bundle", bundle_path, "--target", target]
    for var in evidence:
        argv += ["-e", f"{var}={evidence[var]}"]
    captured = io.StringIO()
    with contextlib.redirect_stdout(captured):
        assert bnkit(argv) == 0
    lines = captured.getvalue().strip().splitlines()[1:]
    table = dict(line.split("\t") for line in lines[1:])
    return table


def build(out_path: str, cases: int, seed: int) -> None:
    os.environ.setdefault("SOURCE_DATE_EPOCH", "1533081600")
    rng = np.random.default_rng(seed)
    with tempfile.TemporaryDirectory() as tmp:
        fixture = os.path.join(tmp, "fixture")
        work = os.path.join(tmp, "work")
        demo.write_demo_files(fixture, n=400, seed=seed, replicates=4)
        assert bnkit(["enrich", "--input", f"{fixture}/listings.csv",
                      "--features", f"{fixture}/features.json",
                      "--out", f"{fixture}/enriched.csv"]) == 0
        assert bnkit(["discretize", "--spec", f"{fixture}/runspec.json", "--workdir", work]) == 0
        assert bnkit(["learn", "--spec", f"{fixture}/runspec.json", "--workdir", work]) == 0
        bundle_path = os.path.join(work, "model.json")
        bundle = ModelBundle.load(bundle_path)
        net = bundle.to_network()
        client = TestClient(create_app(bundle))

        model_payload = client.get("/model").json()
        target = bundle.target
        names = [n for n in net.node_names if n != target]

        query_cases = []
        for _ in range(cases):
            k = int(rng.integers(0, 4))
            chosen = [names[i] for i in rng.choice(len(names), size=k, replace=False)]
            evidence = {
                n: net.variable(n).states[rng.integers(0, net.variable(n).cardinality)]
                for n in chosen
            }
            response = client.post("/query", json={"target": target, "evidence": evidence})
            assert response.status_code == 200
            query_cases.append(
                {
                    "evidence": evidence,
                    "payload": json.loads(response.text),
                    "cli_digits": cli_query_digits(bundle_path, target, evidence),
                }
            )

        scenario_payloads = []
        scenarios = json.load(open(f"{fixture}/scenarios.json"))["scenarios"]
        for scenario in scenarios:
            response = client.post(
                "/scenario",
                json={"label": scenario["label"], "target": target, "evidence": scenario["evidence"]},
            )
            assert response.status_code == 200
            scenario_payloads.append(json.loads(response.text))

        tornado_payload = client.post(
            "/tornado", json={"target": target, "state": "Luxury", "top_k": 8, "window": 0.1}
        ).json()

        out = {
            "model": model_payload,
            "queries": query_cases,
            "scenarios": scenario_payloads,
            "tornado": tornado_payload,
        }
    os.makedirs(os.path.dirname(out_path), exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(out, fh, indent=2, ensure_ascii=False)
        fh.write("\n")
    print(f"wrote {out_path} ({cases} query cases, {len(scenario_payloads)} scenarios)")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="frontend/tests/fixtures/parity.json")
    parser.add_argument("--cases", type=int, default=50)
    parser.add_argument("--seed", type=int, default=31337)
    args = parser.parse_args()
    build(args.out, args.cases, args.seed)
