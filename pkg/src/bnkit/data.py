"""Turn raw tabular listings into a fully categorical dataset.

Pipeline order is fixed: deduplicate, drop rows failing declarative
filters (missing or implausible values), IQR outlier filter on numeric
columns, then per-column discretization. Binning is learned once and
frozen as cut points so new data can be encoded identically.

Quantiles everywhere use linear interpolation at position (n-1)*q on the
sorted values (numpy's default), pinned so independent implementations
agree bit for bit.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import DiscreteVariable
from .errors import ContractError, DiscretizationError

DEFAULT_MISSING_TOKENS = frozenset({"", "NA", "NaN", "nan", "null", "NULL", "None"})
RANK_LABELS = ("Most Common", "Frequent", "Less Frequent", "Rare")

_TRUE_TOKENS = frozenset({"yes", "y", "true", "1"})
_FALSE_TOKENS = frozenset({"no", "n", "false", "0"})


@dataclass(frozen=True)
class RawTable:
    """Rectangular table of raw text cells; None marks a missing cell."""

    columns: tuple[str, ...]
    rows: tuple[tuple[str | None, ...], ...]

    def __post_init__(self):
        if len(set(self.columns)) != len(self.columns):
            raise ContractError("duplicate column names")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ContractError("ragged row in raw table")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise ContractError(f"unknown column {name!r}") from None

    def column(self, name: str) -> list[str | None]:
        i = self.column_index(name)
        return [row[i] for row in self.rows]

    def with_rows(self, keep: list[int]) -> "RawTable":
        return RawTable(self.columns, tuple(self.rows[i] for i in keep))


def read_csv(path, delimiter: str = ",", missing_tokens=DEFAULT_MISSING_TOKENS) -> RawTable:
    """Load a delimiter-separated text file with a header row (UTF-8)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ContractError(f"{path}: empty file") from None
        rows = []
        for raw in reader:
            if len(raw) != len(header):
                raise ContractError(f"{path}: row with {len(raw)} cells, header has {len(header)}")
            rows.append(tuple(None if cell in missing_tokens else cell for cell in raw))
    return RawTable(tuple(header), tuple(rows))


def parse_number(cell: str | None) -> float | None:
    if cell is None:
        return None
    try:
        return float(cell)
    except ValueError:
        return None


@dataclass(frozen=True)
class ColumnSpec:
    """Discretization rule for one column.

    kind: 'quantile' (k bins at empirical quantiles), 'categorical'
    (passthrough, optional fixed state order), 'boolean' (two labels),
    or 'frequency_rank' (quartile rank of the label's listing count).
    """

    name: str
    kind: str
    k: int = 0
    labels: tuple[str, ...] = ()
    states: tuple[str, ...] | None = None
    true_label: str = "Yes"
    false_label: str = "No"
    group: str = "other"

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.states is not None:
            object.__setattr__(self, "states", tuple(self.states))
        if self.kind == "quantile":
            if self.k < 2:
                raise ContractError(f"column {self.name!r}: quantile rule needs k >= 2")
            if len(self.labels) != self.k:
                raise ContractError(
                    f"column {self.name!r}: {len(self.labels)} labels for k={self.k}"
                )
        elif self.kind == "boolean":
            if self.true_label == self.false_label:
                raise ContractError(f"column {self.name!r}: boolean labels must differ")
        elif self.kind not in ("categorical", "frequency_rank"):
            raise ContractError(f"column {self.name!r}: unknown rule kind {self.kind!r}")


@dataclass(frozen=True)
class RowFilter:
    """Declarative implausibility predicate; failing rows are dropped.

    Exactly one of min/max/allowed/max_column applies per instance; a
    missing or unparseable cell in the filtered column counts as a
    violation.
    """

    column: str
    min: float | None = None
    max: float | None = None
    allowed: tuple[str, ...] | None = None
    max_column: str | None = None

    def violates(self, table: RawTable, row: tuple[str | None, ...]) -> bool:
        cell = row[table.column_index(self.column)]
        if self.allowed is not None:
            return cell not in self.allowed
        value = parse_number(cell)
        if value is None:
            return True
        if self.min is not None and value < self.min:
            return True
        if self.max is not None and value > self.max:
            return True
        if self.max_column is not None:
            bound = parse_number(row[table.column_index(self.max_column)])
            if bound is None or value > bound:
                return True
        return False


@dataclass(frozen=True)
class DiscretizationSpec:
    columns: tuple[ColumnSpec, ...]
    iqr_factor: float = 2.0
    iqr_columns: tuple[str, ...] | None = None  # None = all quantile columns
    dedup_keys: tuple[str, ...] = ()
    row_filters: tuple[RowFilter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "dedup_keys", tuple(self.dedup_keys))
        object.__setattr__(self, "row_filters", tuple(self.row_filters))
        if self.iqr_factor <= 0:
            raise ContractError("IQR factor must be positive")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ContractError("duplicate column rules")

    def column_spec(self, name: str) -> ColumnSpec:
        for c in self.columns:
            if c.name == name:
                return c
        raise ContractError(f"no rule for column {name!r}")


@dataclass(frozen=True)
class BinEdges:
    """Frozen quantile cut points for one numeric column."""

    column: str
    cuts: tuple[float, ...]  # k-1 interior cut points, non-decreasing
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(float(c) for c in self.cuts))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != len(self.cuts) + 1:
            raise ContractError(f"column {self.column!r}: labels must number cuts + 1")
        if any(a > b for a, b in zip(self.cuts, self.cuts[1:])):
            raise ContractError(f"column {self.column!r}: cut points must be non-decreasing")

    def assign(self, value: float) -> int:
        """First bin whose upper cut is >= value (upper edge inclusive)."""
        lo, hi = 0, len(self.cuts)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.cuts[mid] >= value:
                hi = mid
            else:
                lo = mid + 1
        return lo


@dataclass(frozen=True)
class Dataset:
    """Fully categorical table: one DiscreteVariable per column, cells
    are state indices, no missing values."""

    variables: tuple[DiscreteVariable, ...]
    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        rows = np.asarray(self.rows, dtype=np.int64)
        if rows.ndim != 2 or rows.shape[1] != len(self.variables):
            raise ContractError("dataset rows must be N x n_variables")
        for j, var in enumerate(self.variables):
            col = rows[:, j]
            if col.size and (col.min() < 0 or col.max() >= var.cardinality):
                raise ContractError(f"state index out of range in column {var.name!r}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def variable(self, name: str) -> DiscreteVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise ContractError(f"unknown variable {name!r}")

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.names.index(name)]


def iqr_filter(column, factor: float = 2.0) -> list[bool]:
    """Keep values within [Q1 - factor*IQR, Q3 + factor*IQR].

    Quartiles use linear interpolation at position (n-1)*q.
    """
    values = [v for v in column]
    if not values:
        raise ContractError("IQR filter on empty column")
    if any(v is None for v in values):
        raise ContractError("IQR filter requires a fully numeric column")
    if factor <= 0:
        raise ContractError("IQR factor must be positive")
    arr = np.asarray(values, dtype=np.float64)
    q1, q3 = np.quantile(arr, [0.25, 0.75])
    spread = q3 - q1
    lo, hi = q1 - factor * spread, q3 + factor * spread
    return [bool(lo <= v <= hi) for v in arr]


def quantile_bins(column, k: int, labels, name: str = "<column>") -> tuple[BinEdges, list[str]]:
    """Learn k equal-frequency bins and apply them to the column.

    Interior cut points sit at the j/k empirical quantiles. Ties at a
    cut go to the lower bin (upper edge inclusive), so bin counts can
    differ by the multiplicity of tied values.
    """
    labels = tuple(labels)
    if k < 2:
        raise ContractError("need k >= 2 bins")
    if len(labels) != k:
        raise ContractError(f"{len(labels)} labels for k={k}")
    values = list(column)
    if not values or any(v is None for v in values):
        raise ContractError("quantile binning requires a non-empty numeric column")
    arr = np.asarray(values, dtype=np.float64)
    if len(np.unique(arr)) < k:
        raise DiscretizationError(name, f"fewer than {k} distinct values")
    cuts = tuple(float(c) for c in np.quantile(arr, [j / k for j in range(1, k)]))
    edges = BinEdges(name, cuts, labels)
    return edges, [labels[edges.assign(v)] for v in arr]


def deduplicate(table: RawTable, key_columns) -> RawTable:
    """Keep the first occurrence of each key tuple, in input order."""
    keys = tuple(key_columns)
    if not keys:
        warnings.warn("deduplicate called with no key columns; returning input unchanged")
        return table
    idx = [table.column_index(k) for k in keys]
    seen: set[tuple] = set()
    keep = []
    for i, row in enumerate(table.rows):
        key = tuple(row[j] for j in idx)
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return table.with_rows(keep)


def _weighted_step_quantile(values: np.ndarray, weights: np.ndarray, q: float) -> float:
    """Smallest value whose cumulative weight reaches q of the total."""
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    target = q * cum[-1]
    pos = int(np.searchsorted(cum, target, side="left"))
    return float(values[order][min(pos, len(values) - 1)])


def neighborhood_frequency_rank(counts: dict[str, int]) -> dict[str, str]:
    """Quartile rank of each label by how many listings it carries.

    Quartile thresholds are listing-weighted: each label's count value
    is weighted by that same count, and the q-th threshold is the
    smallest count whose cumulative listing weight reaches q of all
    listings. Labels with equal counts always share a rank.
    """
    if not counts:
        raise ContractError("frequency rank needs at least one label")
    labels = sorted(counts)
    values = np.asarray([counts[l] for l in labels], dtype=np.float64)
    t25 = _weighted_step_quantile(values, values, 0.25)
    t50 = _weighted_step_quantile(values, values, 0.50)
    t75 = _weighted_step_quantile(values, values, 0.75)
    out = {}
    for label, count in zip(labels, values):
        if count >= t75:
            out[label] = RANK_LABELS[0]
        elif count >= t50:
            out[label] = RANK_LABELS[1]
        elif count >= t25:
            out[label] = RANK_LABELS[2]
        else:
            out[label] = RANK_LABELS[3]
    return out


@dataclass(frozen=True)
class ColumnCodec:
    """Frozen encoder for one column, reusable on new data.

    For quantile columns this wraps the BinEdges; for frequency ranks it
    freezes the label->rank mapping (unseen labels map to 'Rare'); for
    categorical and boolean columns it pins the state order.
    """

    spec: ColumnSpec
    states: tuple[str, ...]
    edges: BinEdges | None = None
    rank_map: dict[str, str] = field(default_factory=dict)

    def encode(self, cell: str | None) -> int | None:
        """State index for one raw cell; None if the cell cannot be encoded."""
        if cell is None:
            return None
        kind = self.spec.kind
        if kind == "quantile":
            value = parse_number(cell)
            if value is None:
                return None
            return self.edges.assign(value)
        if kind == "boolean":
            token = cell.strip().lower()
            if token in _TRUE_TOKENS:
                return self.states.index(self.spec.true_label)
            if token in _FALSE_TOKENS:
                return self.states.index(self.spec.false_label)
            return None
        if kind == "frequency_rank":
            rank = self.rank_map.get(cell, RANK_LABELS[3])
            return self.states.index(rank)
        try:
            return self.states.index(cell)
        except ValueError:
            return None


@dataclass(frozen=True)
class CleaningReport:
    """Row accounting for each pipeline stage."""

    rows_read: int
    dropped_duplicates: int
    dropped_missing: int
    dropped_filters: int
    dropped_outliers: int
    rows_kept: int

    def lines(self) -> list[str]:
        return [
            f"rows read:            {self.rows_read}",
            f"dropped as duplicates: {self.dropped_duplicates}",
            f"dropped missing/invalid: {self.dropped_missing}",
            f"dropped by row filters:  {self.dropped_filters}",
            f"dropped as IQR outliers: {self.dropped_outliers}",
            f"rows kept:            {self.rows_kept}",
        ]


@dataclass(frozen=True)
class EncodeResult:
    dataset: Dataset
    codecs: tuple[ColumnCodec, ...]
    report: CleaningReport

    @property
    def bin_edges(self) -> list[BinEdges]:
        return [c.edges for c in self.codecs if c.edges is not None]


def _numeric_or_none(table: RawTable, name: str) -> list[float | None]:
    return [parse_number(cell) for cell in table.column(name)]


def _fit_codec(spec: ColumnSpec, cells: list[str | None]) -> ColumnCodec:
    if spec.kind == "quantile":
        values = [parse_number(c) for c in cells]
        arr = np.asarray(values, dtype=np.float64)
        if len(np.unique(arr)) < spec.k:
            raise DiscretizationError(spec.name, f"fewer than {spec.k} distinct values")
        cuts = tuple(float(c) for c in np.quantile(arr, [j / spec.k for j in range(1, spec.k)]))
        edges = BinEdges(spec.name, cuts, spec.labels)
        return ColumnCodec(spec, spec.labels, edges=edges)
    if spec.kind == "boolean":
        return ColumnCodec(spec, (spec.true_label, spec.false_label))
    if spec.kind == "frequency_rank":
        counts: dict[str, int] = {}
        for c in cells:
            counts[c] = counts.get(c, 0) + 1
        rank_map = neighborhood_frequency_rank(counts)
        return ColumnCodec(spec, RANK_LABELS, rank_map=rank_map)
    # categorical passthrough
    if spec.states is not None:
        states = spec.states
    else:
        states = tuple(sorted(set(cells)))
    if len(states) < 2:
        raise DiscretizationError(spec.name, "fewer than 2 observed categories")
    return ColumnCodec(spec, states)


def encode_dataset(
    table: RawTable,
    spec: DiscretizationSpec,
    codecs: tuple[ColumnCodec, ...] | None = None,
) -> EncodeResult:
    """Run the full cleaning and discretization pipeline.

    Passing ``codecs`` from a previous run re-applies the frozen
    encoders instead of learning new cut points, so identical values
    always land in identical states.
    """
    rows_read = table.n_rows
    for cs in spec.columns:
        table.column_index(cs.name)  # raises with column context

    deduped = deduplicate(table, spec.dedup_keys) if spec.dedup_keys else table
    dropped_dup = rows_read - deduped.n_rows

    # rows missing any rule column, or failing a declarative filter
    rule_idx = [deduped.column_index(cs.name) for cs in spec.columns]
    numeric_idx = [
        deduped.column_index(cs.name) for cs in spec.columns if cs.kind == "quantile"
    ]
    keep: list[int] = []
    dropped_missing = 0
    dropped_filters = 0
    for i, row in enumerate(deduped.rows):
        if any(row[j] is None for j in rule_idx) or any(
            parse_number(row[j]) is None for j in numeric_idx
        ):
            dropped_missing += 1
            continue
        if any(f.violates(deduped, row) for f in spec.row_filters):
            dropped_filters += 1
            continue
        keep.append(i)
    filtered = deduped.with_rows(keep)

    # IQR outlier pass: bounds from this snapshot, all columns at once
    iqr_names = (
        tuple(spec.iqr_columns)
        if spec.iqr_columns is not None
        else tuple(cs.name for cs in spec.columns if cs.kind == "quantile")
    )
    if iqr_names and filtered.n_rows:
        masks = [
            iqr_filter(_numeric_or_none(filtered, name), spec.iqr_factor)
            for name in iqr_names
        ]
        keep = [i for i in range(filtered.n_rows) if all(m[i] for m in masks)]
        dropped_outliers = filtered.n_rows - len(keep)
        surviving = filtered.with_rows(keep)
    else:
        dropped_outliers = 0
        surviving = filtered

    if codecs is None:
        fitted = tuple(_fit_codec(cs, surviving.column(cs.name)) for cs in spec.columns)
    else:
        by_name = {c.spec.name: c for c in codecs}
        fitted = tuple(by_name[cs.name] for cs in spec.columns)

    variables = tuple(
        DiscreteVariable(codec.spec.name, codec.states) for codec in fitted
    )
    encoded_rows = []
    dropped_unencodable = 0
    for row in surviving.rows:
        states = []
        ok = True
        for codec in fitted:
            idx = codec.encode(row[surviving.column_index(codec.spec.name)])
            if idx is None:
                ok = False
                break
            states.append(idx)
        if ok:
            encoded_rows.append(states)
        else:
            dropped_unencodable += 1

    dataset = Dataset(
        variables,
        np.asarray(encoded_rows, dtype=np.int64).reshape(len(encoded_rows), len(variables)),
    )
    report = CleaningReport(
        rows_read=rows_read,
        dropped_duplicates=dropped_dup,
        dropped_missing=dropped_missing + dropped_unencodable,
        dropped_filters=dropped_filters,
        dropped_outliers=dropped_outliers,
        rows_kept=dataset.n,
    )
    return EncodeResult(dataset, fitted, report)
