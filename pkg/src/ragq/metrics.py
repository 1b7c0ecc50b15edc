"""Regression metrics and Pearson correlation analysis."""

from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CorrelationUndefinedError,
    InsufficientDataError,
    MapeUndefinedError,
    R2UndefinedError,
)

METRIC_NAMES = ("MSE", "RMSE", "MAE", "MAPE", "R2")
MAPE_FLOOR = 1e-8


@dataclass(frozen=True)
class MetricsRow:
    mse: float
    rmse: float
    mae: float
    mape: float | None  # percent
    r2: float | None

    def as_tuple(self):
        return astuple(self)


def _pair(y, yhat):
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    yhat = np.asarray(yhat, dtype=np.float64).reshape(-1)
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: {y.shape[0]} targets vs {yhat.shape[0]} predictions")
    if y.shape[0] < 2:
        raise InsufficientDataError("metrics need at least 2 points")
    return y, yhat


def regression_metrics(y, yhat, partial=False):
    """MSE, RMSE, MAE, MAPE (percent) and R^2.

    With ``partial=True`` an undefined MAPE or R^2 is returned as ``None``
    instead of raising.
    """
    y, yhat = _pair(y, yhat)
    err = y - yhat
    mse = float(np.mean(err**2))
    mae = float(np.mean(np.abs(err)))

    mape = r2 = None
    if np.any(np.abs(y) < MAPE_FLOOR):
        if not partial:
            raise MapeUndefinedError("MAPE undefined: a target is (nearly) zero")
    else:
        mape = float(100.0 * np.mean(np.abs(err) / np.abs(y)))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        if not partial:
            raise R2UndefinedError("R^2 undefined: targets have zero variance")
    else:
        r2 = 1.0 - float(np.sum(err**2)) / ss_tot
    return MetricsRow(mse, math.sqrt(mse), mae, mape, r2)


def pearson_corr(x, y):
    x, y = _pair(x, y)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise CorrelationUndefinedError("correlation undefined for a constant input")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    labels: tuple
    values: np.ndarray

    def get(self, a, b):
        return float(self.values[self.labels.index(a), self.labels.index(b)])

    def to_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["", *self.labels])
            for label, row in zip(self.labels, self.values):
                w.writerow([label, *(f"{v:.2f}" for v in row)])
        return path


def correlation_matrix(ds):
    if not ds.has_target:
        raise ValueError("correlation matrix needs a dataset with targets")
    if ds.row_count < 2:
        raise InsufficientDataError("correlation matrix needs at least 2 rows")
    labels = tuple(ds.feature_names) + (ds.target_name,)
    cols = [ds.features[:, j] for j in range(ds.features.shape[1])] + [ds.target]
    for label, col in zip(labels, cols):
        if np.ptp(col) == 0:
            raise CorrelationUndefinedError(f"column '{label}' is constant")
    n = len(cols)
    values = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = pearson_corr(cols[i], cols[j])
    return CorrelationMatrix(labels, values)
