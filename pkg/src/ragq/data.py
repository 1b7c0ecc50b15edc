"""Dataset schema, CSV ingestion, standardization, splitting and sample data."""

from __future__ import annotations

import csv
import hashlib
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ConfigurationError,
    EmptyInputError,
    InsufficientDataError,
    ParseError,
    SchemaError,
)

FEATURES = (
    "query_complexity",
    "doc_relevance",
    "semantic_similarity",
    "diversity",
    "entity_coverage",
    "redundancy",
    "retrieval_depth",
)
TARGET = "answer_quality"
RATIO_FEATURES = frozenset(
    {"doc_relevance", "semantic_similarity", "diversity", "entity_coverage", "redundancy"}
)


class RangeWarning(UserWarning):
    """A ratio feature fell outside [0, 1]."""


@dataclass(frozen=True)
class FeatureSchema:
    feature_names: tuple = FEATURES
    target_name: str = TARGET

    def __post_init__(self):
        if len(self.feature_names) != 7:
            raise SchemaError("schema needs exactly 7 feature names")

    @property
    def columns(self):
        return self.feature_names + (self.target_name,)


SCHEMA = FeatureSchema()


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable table of feature rows with an optional target column.

    ``feature_names`` defaults to the 7 schema features; VMD-expanded datasets
    carry their own ``<feature>_mK`` names.
    """

    features: np.ndarray
    target: np.ndarray | None = None
    feature_names: tuple = FEATURES
    target_name: str = TARGET

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1:
            raise InsufficientDataError("dataset needs at least one row")
        if X.shape[1] != len(self.feature_names):
            raise SchemaError(
                f"{X.shape[1]} feature columns but {len(self.feature_names)} names"
            )
        if not np.all(np.isfinite(X)):
            raise ParseError("non-finite feature value")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if self.target is not None:
            y = np.asarray(self.target, dtype=np.float64).reshape(-1)
            if y.shape[0] != X.shape[0]:
                raise SchemaError("target length differs from row count")
            if not np.all(np.isfinite(y)):
                raise ParseError("non-finite target value")
            object.__setattr__(self, "target", _frozen(y))

    @property
    def row_count(self):
        return self.features.shape[0]

    @property
    def has_target(self):
        return self.target is not None

    def column(self, name):
        if name == self.target_name and self.target is not None:
            return self.target
        return self.features[:, self.feature_names.index(name)]

    def take(self, indices):
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(
            self.features[idx],
            None if self.target is None else self.target[idx],
            self.feature_names,
            self.target_name,
        )

    def with_features(self, features, names):
        return Dataset(features, self.target, tuple(names), self.target_name)

    def equals(self, other, atol=0.0):
        if self.feature_names != other.feature_names or self.has_target != other.has_target:
            return False
        if self.features.shape != other.features.shape:
            return False
        if not np.allclose(self.features, other.features, rtol=0, atol=atol):
            return False
        return self.target is None or np.allclose(self.target, other.target, rtol=0, atol=atol)


@dataclass(frozen=True)
class StandardizationStats:
    mean: np.ndarray
    std: np.ndarray

    def apply(self, X):
        X = np.asarray(X, dtype=np.float64)
        safe = np.where(self.std > 0, self.std, 1.0)
        return np.where(self.std > 0, (X - self.mean) / safe, 0.0)

    def invert(self, Z):
        return np.asarray(Z, dtype=np.float64) * self.std + self.mean


@dataclass(frozen=True)
class SplitIndices:
    train: tuple
    validation: tuple
    adjusted: bool = False

    def digest(self):
        h = hashlib.sha256()
        h.update(np.asarray(self.train, dtype="<i8").tobytes())
        h.update(b"|")
        h.update(np.asarray(self.validation, dtype="<i8").tobytes())
        return h.hexdigest()[:16]


# --- I/O ------------------------------------------------------------------


def load_csv(path, schema=SCHEMA):
    """Read a comma-separated file holding the schema columns in any order."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyInputError(f"{path}: file is empty")
        header = [h.strip() for h in header]
        positions = {}
        for name in schema.columns:
            if name not in header:
                raise SchemaError(f"{path}: missing column '{name}'")
            positions[name] = header.index(name)
        rows = []
        for rownum, record in enumerate(reader, start=1):
            if not record or all(not c.strip() for c in record):
                continue
            values = []
            for name in schema.columns:
                pos = positions[name]
                cell = record[pos].strip() if pos < len(record) else ""
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}: row {rownum}, column '{name}': cannot parse {cell!r}",
                        row=rownum,
                        column=name,
                    ) from None
                if not math.isfinite(v):
                    raise ParseError(
                        f"{path}: row {rownum}, column '{name}': non-finite value {cell!r}",
                        row=rownum,
                        column=name,
                    )
                values.append(v)
            rows.append(values)
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    table = np.array(rows)
    _check_ranges(table[:, :7], schema.feature_names)
    return Dataset(table[:, :7], table[:, 7], schema.feature_names, schema.target_name)


def _check_ranges(X, names):
    for j, name in enumerate(names):
        if name in RATIO_FEATURES:
            col = X[:, j]
            if np.any((col < 0) | (col > 1)):
                warnings.warn(f"column '{name}' has values outside [0, 1]", RangeWarning, stacklevel=3)


def _fmt(name, v):
    if name in RATIO_FEATURES:
        return f"{v:.6f}"
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def save_csv(ds, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(ds.feature_names) + ([ds.target_name] if ds.has_target else [])
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for i in range(ds.row_count):
            row = [_fmt(n, v) for n, v in zip(ds.feature_names, ds.features[i])]
            if ds.has_target:
                row.append(_fmt(ds.target_name, ds.target[i]))
            w.writerow(row)
    return path


# --- transforms -----------------------------------------------------------


def standardize(ds):
    """Z-score every feature column with sample (ddof=1) statistics.

    Constant columns become all-zero and keep std 0 in the returned stats.
    The target column is left alone.
    """
    if ds.row_count < 2:
        raise InsufficientDataError("standardize needs at least 2 rows")
    mean = ds.features.mean(axis=0)
    std = ds.features.std(axis=0, ddof=1)
    # guard against round-off in constant columns
    std = np.where(np.ptp(ds.features, axis=0) == 0, 0.0, std)
    stats = StandardizationStats(_frozen(mean), _frozen(std))
    return ds.with_features(stats.apply(ds.features), ds.feature_names), stats


def split(ds, train_fraction=0.8, seed=0):
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = ds.row_count if isinstance(ds, Dataset) else int(ds)
    if n < 2:
        raise InsufficientDataError("split needs at least 2 rows")
    perm = np.random.default_rng(seed).permutation(n)
    # epsilon absorbs products like 0.29 * 100 = 28.999999999999996
    n_train = math.floor(train_fraction * n + 1e-9)
    adjusted = False
    if n_train < 1:
        n_train, adjusted = 1, True
    elif n_train > n - 1:
        n_train, adjusted = n - 1, True
    return SplitIndices(
        tuple(int(i) for i in perm[:n_train]),
        tuple(int(i) for i in perm[n_train:]),
        adjusted,
    )


# --- built-in data --------------------------------------------------------

_TABLE_ROWS = (
    (4, 0.57, 0.685, 0.353, 0.819, 0.70, 5, 54),
    (8, 0.55, 0.678, 0.462, 0.946, 0.8, 6, 45),
    (6, 0.55, 0.44, 0.665, 0.658, 0.54, 6, 49),
    (6, 0.82, 0.669, 0.4, 0.797, 0.72, 7, 54),
    (3, 0.75, 0.54, 0.536, 0.823, 0.69, 4, 62),
    (3, 0.70, 0.665, 0.376, 0.866, 0.67, 7, 62),
    (2, 0.64, 0.352, 0.587, 0.724, 0.57, 8, 62),
    (7, 0.86, 0.668, 0.454, 0.687, 0.69, 8, 58),
)


def embedded_sample():
    """The eight published sample rows."""
    t = np.array(_TABLE_ROWS, dtype=np.float64)
    return Dataset(t[:, :7], t[:, 7])


# column order: 7 features then target
_CORR_PAIRS = {
    ("answer_quality", "doc_relevance"): 0.66,
    ("semantic_similarity", "diversity"): -0.89,
    ("redundancy", "diversity"): -0.88,
    ("semantic_similarity", "redundancy"): 0.80,
    ("answer_quality", "entity_coverage"): 0.35,
    ("answer_quality", "query_complexity"): -0.30,
    ("answer_quality", "retrieval_depth"): 0.10,
    ("answer_quality", "semantic_similarity"): 0.05,
    ("answer_quality", "diversity"): -0.05,
    ("doc_relevance", "semantic_similarity"): 0.20,
    ("doc_relevance", "entity_coverage"): 0.15,
    ("query_complexity", "retrieval_depth"): 0.10,
}

# (center, scale, low, high, decimals); decimals=0 means integer counts
_RANGES = {
    "query_complexity": (5.0, 2.0, 1, 10, 0),
    "doc_relevance": (0.68, 0.12, 0.0, 1.0, 6),
    "semantic_similarity": (0.58, 0.12, 0.0, 1.0, 6),
    "diversity": (0.48, 0.10, 0.0, 1.0, 6),
    "entity_coverage": (0.78, 0.09, 0.0, 1.0, 6),
    "redundancy": (0.66, 0.08, 0.0, 1.0, 6),
    "retrieval_depth": (6.0, 1.8, 1, 10, 0),
    "answer_quality": (56.0, 7.0, 0, 100, 0),
}


def target_correlation():
    cols = SCHEMA.columns
    C = np.eye(len(cols))
    for (a, b), r in _CORR_PAIRS.items():
        i, j = cols.index(a), cols.index(b)
        C[i, j] = C[j, i] = r
    return C


def synthesize(n, seed=0):
    """Draw ``n`` rows whose Pearson structure follows :func:`target_correlation`.

    Correlated standard normals are mapped linearly into each column's range
    and clipped, which leaves the correlations essentially intact.
    """
    if n < 10:
        raise ValueError(f"synthesize needs n >= 10, got {n}")
    try:
        L = np.linalg.cholesky(target_correlation())
    except np.linalg.LinAlgError as exc:
        raise ConfigurationError("target correlation matrix is not positive definite") from exc
    z = np.random.default_rng(seed).standard_normal((n, 8)) @ L.T
    out = np.empty_like(z)
    for j, name in enumerate(SCHEMA.columns):
        center, scale, lo, hi, decimals = _RANGES[name]
        out[:, j] = np.round(np.clip(center + scale * z[:, j], lo, hi), decimals)
    return Dataset(out[:, :7], out[:, 7])
