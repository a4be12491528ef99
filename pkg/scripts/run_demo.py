#!/usr/bin/env python3
"""End-to-end walkthrough on the synthetic city fixture.

Writes the fixture, computes spatial features, cleans and discretizes,
learns the consensus network, then runs the full query and sensitivity
suite. Everything lands in the output directory (default ./demo_out).
"""

import argparse
import os
import sys

from bnkit.cli import main as bnkit


def sh(argv: list[str]) -> None:
    print(f"\n$ bnkit {' '.join(argv)}")
    code = bnkit(argv)
    if code != 0:
        sys.exit(code)


def run(out: str, rows: int, replicates: int, seed: int) -> None:
    fixture = os.path.join(out, "fixture")
    work = os.path.join(out, "work")
    sh(["make-demo", "--out", fixture, "--rows", str(rows),
        "--seed", str(seed), "--replicates", str(replicates)])
    sh(["enrich",
        "--input", os.path.join(fixture, "listings.csv"),
        "--features", os.path.join(fixture, "features.json"),
        "--out", os.path.join(fixture, "enriched.csv"),
        "--boundary", "CITY"])
    spec = os.path.join(fixture, "runspec.json")
    sh(["discretize", "--spec", spec, "--workdir", work])
    sh(["learn", "--spec", spec, "--workdir", work])
    bundle = os.path.join(work, "model.json")
    sh(["query", "--bundle", bundle, "--target", "PRICE"])
    sh(["query", "--bundle", bundle, "--target", "PRICE",
        "-e", "CENTRE=Very Near", "-e", "LIFT=Yes"])
    sh(["mpe", "--bundle", bundle, "-e", "PRICE=Luxury"])
    sh(["scan", "--bundle", bundle, "--target", "PRICE", "--top", "10"])
    sh(["scenario", "--bundle", bundle,
        "--scenarios", os.path.join(fixture, "scenarios.json"),
        "--target", "PRICE"])
    sh(["sensitivity", "--bundle", bundle, "--kind", "mi", "--x100"])
    sh(["sensitivity", "--bundle", bundle, "--kind", "sobol", "--x100"])
    sh(["sensitivity", "--bundle", bundle, "--kind", "arc"])
    sh(["sensitivity", "--bundle", bundle, "--kind", "tornado",
        "--state", "Luxury", "--top-k", "10"])
    sh(["export", "--bundle", bundle, "--format", "graph-dot",
        "--out", os.path.join(work, "model.dot"), "--with-sensitivity", "PRICE"])
    sh(["export", "--bundle", bundle, "--format", "graph-json",
        "--out", os.path.join(work, "model.graph.json")])
    print(f"\ndone; artifacts in {out}")
    print(f"serve the model with: bnkit serve --bundle {bundle}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo_out")
    parser.add_argument("--rows", type=int, default=1500)
    parser.add_argument("--replicates", type=int, default=40)
    parser.add_argument("--seed", type=int, default=20180101)
    args = parser.parse_args()
    run(args.out, args.rows, args.replicates, args.seed)
