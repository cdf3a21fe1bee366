"""Tabular datasets: synthetic generators, quantile binning and CSV I/O.

A :class:`Dataset` is a rectangular table with a column schema.  Categorical
cells are strings, numeric and target cells are floats (multiclass targets
are strings).  CSV files use RFC-4180 quoting with a mandatory header row;
the schema travels in a JSON sidecar document.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace

import numpy as np

from . import rng

COLUMN_KINDS = ("numeric", "categorical", "target")

# Threshold of the quadratic label rule: sum of ten squared standard normals
# compared against the chi-square(10) median, label 1 on strict excess.
HASTIE_THRESHOLD = 9.34


@dataclass(frozen=True)
class Column:
    name: str
    kind: str

    def __post_init__(self):
        if self.kind not in COLUMN_KINDS:
            raise ValueError(f"unknown column kind {self.kind!r}")


@dataclass
class Dataset:
    """Column-schema'd table; immutable by convention after construction."""

    columns: list[Column]
    values: np.ndarray  # object array, shape (n_rows, n_columns)
    task: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=object)
        if self.values.ndim != 2:
            raise ValueError("dataset values must be 2-dimensional")
        if self.values.shape[1] != len(self.columns):
            raise ValueError("value width does not match the schema")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError("duplicate column names")
        if sum(1 for c in self.columns if c.kind == "target") != 1:
            raise ValueError("dataset needs exactly one target column")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def feature_columns(self) -> list[Column]:
        return [c for c in self.columns if c.kind != "target"]

    @property
    def target_column(self) -> Column:
        return next(c for c in self.columns if c.kind == "target")

    def column_values(self, name: str) -> np.ndarray:
        idx = [c.name for c in self.columns].index(name)
        return self.values[:, idx]

    def feature_matrix(self) -> np.ndarray:
        idx = [i for i, c in enumerate(self.columns) if c.kind != "target"]
        return self.values[:, idx]

    def categorical_feature_indices(self) -> list[int]:
        """Indices of categorical columns within the feature matrix."""
        return [i for i, c in enumerate(self.feature_columns) if c.kind == "categorical"]

    def feature_names(self) -> list[str]:
        return [c.name for c in self.feature_columns]

    def target(self) -> np.ndarray:
        col = self.column_values(self.target_column.name)
        if self.task == "multiclass":
            return col
        return col.astype(np.float64)

    def subset(self, row_indices) -> "Dataset":
        return replace(self, values=self.values[np.asarray(row_indices)])


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a synthetic classification table.

    ``kind`` is one of ``classification_blobs`` (class-dependent Gaussian
    clusters on the informative axes, standard-normal noise elsewhere) and
    ``hastie_quadratic`` (ten standard-normal features, label 1 iff the sum
    of squares exceeds the chi-square(10) median).

    The trailing ``n_categorical`` feature columns are converted to
    categoricals by quantile binning, with per-column bin counts drawn from
    ``bins_per_categorical`` (inclusive range).  For ``classification_blobs``
    the informative axes are the categorical columns first, then the leading
    numeric columns, so the categorical features always carry signal.
    """

    kind: str
    n_rows: int = 10_000
    n_features: int = 10
    n_informative: int = 5
    n_categorical: int = 2
    bins_per_categorical: tuple[int, int] = (10, 20)
    class_sep: float = 1.0
    label_noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("classification_blobs", "hastie_quadratic"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.n_rows < 1 or self.n_features < 1:
            raise ValueError("need at least one row and one feature")
        if self.n_categorical > self.n_features:
            raise ValueError("n_categorical cannot exceed n_features")
        lo, hi = self.bins_per_categorical
        if not (2 <= lo <= hi):
            raise ValueError("bins_per_categorical must be an increasing range >= 2")
        if self.kind == "hastie_quadratic" and self.n_features != 10:
            raise ValueError("hastie_quadratic is defined on exactly 10 features")
        if self.kind == "classification_blobs" and self.n_informative > self.n_features:
            raise ValueError("n_informative cannot exceed n_features")
        if not 0.0 <= self.label_noise < 0.5:
            raise ValueError("label_noise must be in [0, 0.5)")


def quantile_bin(values, n_bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Bin a numeric column at empirical quantiles i/n_bins.

    Returns ``(labels, edges)`` where labels are strings ``b0..b{m-1}`` and
    edges are the retained (deduplicated) cut points; a value x falls in bin
    j iff edges[j-1] < x <= edges[j].  Duplicate or degenerate edges are
    merged, so the actual bin count m = len(edges) + 1 may be below n_bins.
    Binning is order-preserving.
    """
    col = np.asarray(values, dtype=np.float64)
    if n_bins < 2:
        raise ValueError("n_bins must be at least 2")
    if col.size < 2:
        raise ValueError("cannot bin fewer than two values")
    order = np.sort(col)
    n = col.size
    positions = [int(np.ceil(i * n / n_bins)) - 1 for i in range(1, n_bins)]
    edges = np.unique(order[positions])
    edges = edges[edges < order[-1]]
    codes = np.searchsorted(edges, col, side="left")
    labels = np.array([f"b{c}" for c in codes], dtype=object)
    return labels, edges


def _generate_blobs(spec: GeneratorSpec, stream: rng.RandomStream):
    n, p = spec.n_rows, spec.n_features
    cat_cols = list(range(p - spec.n_categorical, p))
    informative = list(cat_cols)
    for j in range(p):
        if len(informative) >= spec.n_informative:
            break
        if j not in informative:
            informative.append(j)
    informative = sorted(informative[: spec.n_informative])

    y = (stream.uniforms(n) < 0.5).astype(np.float64)
    X = np.empty((n, p), dtype=np.float64)
    for j in range(p):
        u1 = stream.uniforms(n)
        u2 = stream.uniforms(n)
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
        if j in informative:
            center = (y - 0.5) * spec.class_sep
            X[:, j] = center + z
        else:
            X[:, j] = z
    if spec.label_noise > 0:
        flip = stream.uniforms(n) < spec.label_noise
        y = np.where(flip, 1.0 - y, y)
    return X, y, cat_cols


def hastie_label(X) -> np.ndarray:
    """Quadratic rule: label 1 iff the squared norm strictly exceeds the
    chi-square(10) median threshold."""
    X = np.asarray(X, dtype=np.float64)
    return (np.sum(X * X, axis=1) > HASTIE_THRESHOLD).astype(np.float64)


def _generate_hastie(spec: GeneratorSpec, stream: rng.RandomStream):
    n, p = spec.n_rows, spec.n_features
    X = np.empty((n, p), dtype=np.float64)
    for j in range(p):
        u1 = stream.uniforms(n)
        u2 = stream.uniforms(n)
        X[:, j] = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    y = hastie_label(X)
    if spec.label_noise > 0:
        flip = stream.uniforms(n) < spec.label_noise
        y = np.where(flip, 1.0 - y, y)
    cat_cols = list(range(p - spec.n_categorical, p))
    return X, y, cat_cols


def generate(spec: GeneratorSpec) -> Dataset:
    """Deterministically generate a dataset from the spec (same spec + seed
    always yields the identical table)."""
    stream = rng.RandomStream(int(rng.derive_key(spec.seed, 0xDA7A)))
    if spec.kind == "classification_blobs":
        X, y, cat_cols = _generate_blobs(spec, stream)
    else:
        X, y, cat_cols = _generate_hastie(spec, stream)

    lo, hi = spec.bins_per_categorical
    values = np.empty((spec.n_rows, spec.n_features + 1), dtype=object)
    columns: list[Column] = []
    for j in range(spec.n_features):
        name = f"x{j}"
        if j in cat_cols:
            n_bins = lo + int(stream.uniforms(1)[0] * (hi - lo + 1))
            n_bins = min(n_bins, hi)
            labels, _ = quantile_bin(X[:, j], n_bins)
            values[:, j] = labels
            columns.append(Column(name, "categorical"))
        else:
            values[:, j] = X[:, j]
            columns.append(Column(name, "numeric"))
    values[:, -1] = y
    columns.append(Column("y", "target"))
    return Dataset(columns=columns, values=values, task="binary")


# --- CSV and schema I/O -------------------------------------------------------


def schema_to_document(dataset_or_columns, task: str | None = None) -> dict:
    if isinstance(dataset_or_columns, Dataset):
        columns = dataset_or_columns.columns
        task = dataset_or_columns.task
    else:
        columns = dataset_or_columns
    return {
        "task": task,
        "columns": [{"name": c.name, "kind": c.kind} for c in columns],
    }


def schema_from_document(doc: dict) -> tuple[list[Column], str]:
    try:
        columns = [Column(c["name"], c["kind"]) for c in doc["columns"]]
        task = doc["task"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed schema document: missing field {exc}") from exc
    if task not in ("binary", "multiclass", "regression"):
        raise ValueError(f"schema field 'task': unknown task {task!r}")
    return columns, task


def write_csv(dataset: Dataset, path) -> None:
    """RFC-4180 CSV with header; floats as shortest round-trippable decimals."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        writer.writerow([c.name for c in dataset.columns])
        kinds = [c.kind for c in dataset.columns]
        numeric_target = dataset.task != "multiclass"
        for row in dataset.values:
            out = []
            for kind, cell in zip(kinds, row):
                if kind == "categorical" or (kind == "target" and not numeric_target):
                    out.append(cell)
                else:
                    out.append(repr(float(cell)))
            writer.writerow(out)


def read_csv(path, columns: list[Column], task: str) -> Dataset:
    """Parse a CSV against a schema; header row is mandatory and must match."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty CSV: missing header row") from None
        expected = [c.name for c in columns]
        if header != expected:
            unknown = [h for h in header if h not in expected]
            if unknown:
                raise ValueError(f"unknown columns in header: {unknown}")
            raise ValueError(f"header {header} does not match schema {expected}")
        kinds = [c.kind for c in columns]
        numeric_target = task != "multiclass"
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(columns):
                raise ValueError(
                    f"line {line_no}: expected {len(columns)} cells, got {len(row)}"
                )
            parsed = []
            for col, kind, cell in zip(columns, kinds, row):
                if kind == "categorical" or (kind == "target" and not numeric_target):
                    parsed.append(cell)
                else:
                    try:
                        parsed.append(float(cell))
                    except ValueError:
                        raise ValueError(
                            f"line {line_no}: non-numeric cell {cell!r} in numeric "
                            f"column {col.name!r}"
                        ) from None
            rows.append(parsed)
    if not rows:
        raise ValueError("CSV contains no data rows")
    values = np.array(rows, dtype=object)
    return Dataset(columns=list(columns), values=values, task=task)


def write_schema(dataset: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(schema_to_document(dataset), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_schema(path) -> tuple[list[Column], str]:
    with open(path, "r", encoding="utf-8") as fh:
        return schema_from_document(json.load(fh))
