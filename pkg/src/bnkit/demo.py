"""Synthetic city fixture: listings, geo features, run spec, scenarios.

Generates a seeded housing-listings table with known dependencies
(distance to the center drives price, building height drives lift
presence, area drives room count) plus the kinds of dirt the cleaning
pipeline exists for: duplicate rows, missing cells, implausible values,
and price outliers. Used by the demo scripts and the end-to-end tests.
"""

from __future__ import annotations

import csv
import json
import math
import os

import numpy as np

CITY_CENTER = (42.0, -4.5)

NEIGHBORHOODS = {
    "Bridgewater": ((41.9796, -4.4934), 0.10),
    "Old Town": ((41.9978, -4.5026), 0.24),
    "Castle Hill": ((42.0181, -4.5009), 0.18),
    "Northfield": ((42.0572, -4.4392), 0.06),
    "Westbrook": ((41.9751, -4.5418), 0.13),
    "Garden Quarter": ((41.9942, -4.4722), 0.15),
    "Station North": ((42.0437, -4.4942), 0.10),
    "Southmarket": ((41.9672, -4.5032), 0.04),
}

STREET1 = [(42.0035, -4.5082), (42.0032, -4.4967), (42.0072, -4.4852)]
STREET2 = [(41.9732, -4.4892), (42.0132, -4.4852), (42.0532, -4.4822)]

PRICE_LABELS = ["Very Low", "Low", "Medium Low", "Medium High", "High", "Luxury"]
DISTANCE_LABELS = ["Very Near", "Near", "Medium", "Far"]

HEADER = [
    "lat",
    "lon",
    "AREA",
    "ROOMS",
    "BATHS",
    "FLOOR",
    "HEIGHT",
    "AGE",
    "QUALITY",
    "LIFT",
    "AC",
    "TRRC",
    "TYPE",
    "CONDITION",
    "PRICE",
]


def _approx_km_to_center(lat: float, lon: float) -> float:
    dy = (lat - CITY_CENTER[0]) * 111.19
    dx = (lon - CITY_CENTER[1]) * 111.19 * math.cos(math.radians(CITY_CENTER[0]))
    return math.hypot(dx, dy)


def generate_listings(n: int, seed: int) -> list[list[str]]:
    rng = np.random.default_rng(seed)
    names = list(NEIGHBORHOODS)
    weights = np.array([NEIGHBORHOODS[k][1] for k in names])
    weights = weights / weights.sum()

    rows: list[list[str]] = []
    for _ in range(n):
        hood = names[rng.choice(len(names), p=weights)]
        (clat, clon), _ = NEIGHBORHOODS[hood]
        lat = clat + rng.normal(0.0, 0.004)
        lon = clon + rng.normal(0.0, 0.005)
        dist_km = _approx_km_to_center(lat, lon)

        area = float(np.clip(rng.lognormal(4.35, 0.40), 25, 420))
        rooms = int(np.clip(round(area / 35.0 + rng.normal(0, 0.7)), 1, 6))
        baths = int(np.clip(round(area / 90.0 + rng.normal(0.8, 0.5)), 1, 4))
        height = int(np.clip(round(rng.gamma(4.0, 1.6)), 1, 14))
        floor = int(rng.integers(0, height + 1))
        age = int(np.clip(round(rng.gamma(5.0, 11.0)), 0, 160))
        quality = int(np.clip(round(3.0 + 3.0 / (1.0 + dist_km) + rng.normal(0, 1.6)), 1, 10))
        lift = rng.random() < min(0.95, 0.15 + 0.07 * height)
        ac = rng.random() < 0.45
        trrc = rng.random() < (0.5 if floor == height else 0.25)
        type_ = rng.choice(
            ["Standard", "Studio", "Duplex", "Penthouse"], p=[0.82, 0.08, 0.06, 0.04]
        )
        condition = rng.choice(
            [
                "Second Hand Good Condition",
                "Second Hand Renovation",
                "New Construction",
            ],
            p=[0.68, 0.2, 0.12],
        )
        log_price = (
            math.log(3200.0)
            - 0.28 * dist_km
            + (0.20 if lift else 0.0)
            + 0.06 * math.log(area / 100.0)
            - 0.0012 * age
            + rng.normal(0.0, 0.16)
        )
        price = math.exp(log_price)
        rows.append(
            [
                repr(round(lat, 6)),
                repr(round(lon, 6)),
                repr(round(area, 1)),
                str(rooms),
                str(baths),
                str(floor),
                str(height),
                str(age),
                str(quality),
                "yes" if lift else "no",
                "yes" if ac else "no",
                "yes" if trrc else "no",
                str(type_),
                str(condition),
                repr(round(price, 2)),
            ]
        )

    # dirt: exact duplicates, then targeted corruption of single cells
    dup_count = max(2, n // 50)
    for i in range(dup_count):
        rows.append(list(rows[int(rng.integers(0, n))]))

    col = {name: i for i, name in enumerate(HEADER)}

    def corrupt(count, fn):
        for idx in rng.choice(n, size=count, replace=False):
            fn(rows[int(idx)])

    corrupt(max(1, n // 100), lambda r: r.__setitem__(col["ROOMS"], "0"))
    corrupt(max(1, n // 150), lambda r: r.__setitem__(col["FLOOR"], str(int(r[col["HEIGHT"]]) + 3)))
    corrupt(max(1, n // 200), lambda r: r.__setitem__(col["AGE"], "-5"))
    corrupt(max(1, n // 200), lambda r: r.__setitem__(col["QUALITY"], "99"))
    corrupt(max(1, n // 120), lambda r: r.__setitem__(col["AREA"], ""))
    corrupt(max(1, n // 200), lambda r: r.__setitem__(col["PRICE"], repr(round(float(r[col["PRICE"]]) * 9.0, 2))))
    return rows


def features_obj() -> dict:
    return {
        "points": {"CENTRE": list(CITY_CENTER)},
        "polylines": {
            "STREET1": [list(p) for p in STREET1],
            "STREET2": [list(p) for p in STREET2],
        },
        "centroids": {name: list(pos) for name, (pos, _) in NEIGHBORHOODS.items()},
        "polygons": {
            "CITY": [
                [41.88, -4.65],
                [41.88, -4.35],
                [42.13, -4.35],
                [42.13, -4.65],
            ]
        },
    }


def runspec_obj(input_path: str, seed: int, replicates: int, threshold: float = 0.5) -> dict:
    distance = lambda name: {
        "name": name,
        "rule": "quantile",
        "k": 4,
        "labels": DISTANCE_LABELS,
        "group": "spatial",
    }
    return {
        "input": {"path": input_path, "delimiter": ","},
        "dedup_keys": ["lat", "lon", "AREA", "ROOMS", "BATHS", "FLOOR", "TYPE"],
        "row_filters": [
            {"column": "ROOMS", "min": 1},
            {"column": "BATHS", "min": 1},
            {"column": "FLOOR", "max_column": "HEIGHT"},
            {"column": "AGE", "min": 0, "max": 170},
            {"column": "QUALITY", "min": 1, "max": 10},
        ],
        "iqr": {"factor": 2.0, "columns": ["PRICE", "AREA"]},
        "columns": [
            {"name": "PRICE", "rule": "quantile", "k": 6, "labels": PRICE_LABELS, "group": "target"},
            {"name": "AREA", "rule": "quantile", "k": 4, "labels": ["Small", "Medium", "Large", "Luxury"], "group": "structural"},
            {"name": "AGE", "rule": "quantile", "k": 4, "labels": ["New Development", "Modern", "Mid-Age", "Historic"], "group": "structural"},
            {"name": "ROOMS", "rule": "quantile", "k": 3, "labels": ["Few", "Moderate", "Many"], "group": "structural"},
            {"name": "BATHS", "rule": "quantile", "k": 3, "labels": ["Few", "Moderate", "Many"], "group": "structural"},
            {"name": "FLOOR", "rule": "quantile", "k": 4, "labels": ["Lower", "Mid", "Upper", "Top"], "group": "structural"},
            {"name": "HEIGHT", "rule": "quantile", "k": 4, "labels": ["Low-Rise", "Mid-Rise", "High-Rise", "Skyscraper"], "group": "structural"},
            {"name": "QUALITY", "rule": "quantile", "k": 4, "labels": ["Low Value", "Moderate Value", "High Value", "Very High Value"], "group": "structural"},
            {"name": "TYPE", "rule": "categorical", "states": ["Duplex", "Penthouse", "Standard", "Studio"], "group": "structural"},
            {"name": "CONDITION", "rule": "categorical", "group": "structural"},
            {"name": "LIFT", "rule": "boolean", "group": "amenity"},
            {"name": "AC", "rule": "boolean", "group": "amenity"},
            {"name": "TRRC", "rule": "boolean", "group": "amenity"},
            distance("CENTRE"),
            distance("STREET1"),
            distance("STREET2"),
            {"name": "NBHD", "rule": "frequency_rank", "group": "spatial"},
        ],
        "constraints": {"no_outgoing": ["PRICE"]},
        "learn": {"tabu_tenure": 10, "max_non_improving": 30, "seed": seed},
        "bootstrap": {"replicates": replicates, "threshold": threshold},
        "target": "PRICE",
        "scenarios": scenarios_obj()["scenarios"],
    }


def scenarios_obj() -> dict:
    return {
        "scenarios": [
            {"label": "Luxury Core", "evidence": {"CENTRE": "Very Near", "STREET1": "Very Near", "AREA": "Luxury", "LIFT": "Yes"}},
            {"label": "Urban Compact", "evidence": {"AREA": "Small", "AGE": "Historic", "CENTRE": "Near"}},
            {"label": "Peripheral Standard", "evidence": {"CENTRE": "Far", "STREET1": "Far", "STREET2": "Far"}},
            {"label": "Modern Convenience", "evidence": {"AGE": "Modern", "LIFT": "Yes"}},
            {"label": "Family Mid", "evidence": {"ROOMS": "Many", "AREA": "Large", "FLOOR": "Mid"}},
            {"label": "Top Floor View", "evidence": {"FLOOR": "Top", "LIFT": "Yes", "TRRC": "Yes"}},
            {"label": "Renovated Classic", "evidence": {"AGE": "Historic", "CONDITION": "Second Hand Renovation"}},
        ]
    }


def write_demo_files(
    directory,
    n: int = 1500,
    seed: int = 20180101,
    replicates: int = 40,
    threshold: float = 0.5,
) -> dict[str, str]:
    """Write listings.csv, features.json, runspec.json, scenarios.json."""
    os.makedirs(directory, exist_ok=True)
    paths = {
        "listings": os.path.join(directory, "listings.csv"),
        "features": os.path.join(directory, "features.json"),
        "runspec": os.path.join(directory, "runspec.json"),
        "scenarios": os.path.join(directory, "scenarios.json"),
    }
    with open(paths["listings"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        writer.writerows(generate_listings(n, seed))
    with open(paths["features"], "w", encoding="utf-8") as fh:
        json.dump(features_obj(), fh, indent=2)
        fh.write("\n")
    with open(paths["runspec"], "w", encoding="utf-8") as fh:
        json.dump(runspec_obj("enriched.csv", seed, replicates, threshold), fh, indent=2)
        fh.write("\n")
    with open(paths["scenarios"], "w", encoding="utf-8") as fh:
        json.dump(scenarios_obj(), fh, indent=2)
        fh.write("\n")
    return paths
