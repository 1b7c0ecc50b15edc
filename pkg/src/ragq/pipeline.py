"""Decompose -> tune -> train/evaluate, and the six-model benchmark."""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import data as data_mod
from .config import PipelineConfig
from .errors import DataError, MetricUndefinedError, PipelineError, RagqError
from .metrics import correlation_matrix, regression_metrics
from .pso import bilstm_search_space, gbt_search_space, optimize
from .regressors import BaselineConfig, BiLSTMRegressor, GbtConfig, GradientBoostedTrees, make_baseline
from .report import EvalReport, ModelResult, render_bar_charts, render_heatmap, write_report_csv
from .vmd import expand_features

log = logging.getLogger(__name__)

# display name -> baseline kind, in report order
BASELINES = (
    ("DecisionTrees", "decision_tree"),
    ("AdaBoost", "adaboost_r2"),
    ("GBDT", "gbdt"),
    ("ExtraTrees", "extra_trees"),
    ("KNN", "knn"),
)
LR_DROP_SHARE = 0.7  # learning-rate drop at 70% of the epochs (350 of 500)


def derive_seed(seed, stream):
    """Independent seed per named stage so stages never share randomness."""
    digest = hashlib.sha256(f"{seed}/{stream}".encode()).digest()
    return int.from_bytes(digest[:4], "little")


def load_data(source):
    if source == "embedded":
        return data_mod.embedded_sample()
    if source.startswith("synthetic:"):
        rows, _, seed = source[len("synthetic:"):].partition(":")
        return data_mod.synthesize(int(rows), int(seed) if seed else 0)
    return data_mod.load_csv(source)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineError:
        raise
    except RagqError as exc:
        if isinstance(exc, DataError):
            raise
        raise PipelineError(name, exc) from exc


@dataclass
class Prepared:
    raw: data_mod.Dataset
    standardized: data_mod.Dataset
    expanded: data_mod.Dataset
    split: data_mod.SplitIndices


def prepare(cfg, ds=None):
    ds = ds if ds is not None else _stage("data", load_data, cfg.data)
    if not ds.has_target:
        raise DataError("dataset has no answer_quality target")
    std, _ = _stage("standardize", data_mod.standardize, ds)
    expanded = _stage("vmd", expand_features, std, cfg.vmd)
    sp = data_mod.split(ds, cfg.split_fraction, derive_seed(cfg.seed, "split"))
    return Prepared(ds, std, expanded, sp)


def _bilstm_config(cfg, position, epochs, seed):
    l2, lr, hidden = position
    return replace(
        cfg.bilstm,
        l2_coefficient=float(l2),
        initial_lr=float(lr),
        hidden_units=int(hidden),
        max_epochs=epochs,
        lr_drop_epoch=max(1, round(LR_DROP_SHARE * epochs)),
        channels=cfg.vmd.n_modes,
        seed=seed,
    )


def build_model(cfg, position, epochs, seed):
    if cfg.model == "bilstm":
        return BiLSTMRegressor(_bilstm_config(cfg, position, epochs, seed))
    lr, depth, lam = position
    return GradientBoostedTrees(
        GbtConfig(
            learning_rate=float(lr),
            max_depth=int(depth),
            leaf_l2=float(lam),
            n_rounds=cfg.gbt_rounds,
            seed=seed,
        )
    )


def search_space(cfg):
    return bilstm_search_space() if cfg.model == "bilstm" else gbt_search_space()


@dataclass
class PipelineResult:
    model: object
    pso: object
    metrics: object
    prepared: Prepared
    wall_time: float


def run_full_pipeline(cfg, ds=None, executor=None):
    """Standardize, VMD-expand, split, tune by validation R^2, retrain, evaluate."""
    t0 = time.perf_counter()
    prep = prepare(cfg, ds)
    X = prep.expanded.features
    y = prep.expanded.target
    tr, va = np.array(prep.split.train), np.array(prep.split.validation)

    def fitness(position, eval_seed):
        model = build_model(cfg, position, cfg.tuning_epochs, eval_seed)
        model.fit(X[tr], y[tr])
        return regression_metrics(y[va], model.predict(X[va]), partial=True).r2

    space = search_space(cfg)
    log.info("tuning %s over %s", cfg.model, space.names)
    pso_result = _stage("pso", optimize, space, _checked(fitness), cfg.pso, derive_seed(cfg.seed, "pso"), executor)
    log.info("best %s -> validation R2 %.4f", pso_result.best_position, pso_result.best_fitness)

    model = build_model(cfg, pso_result.best_position, cfg.final_epochs, derive_seed(cfg.seed, "model"))
    _stage("train", model.fit, X[tr], y[tr])
    metrics = _stage("evaluate", regression_metrics, y[va], model.predict(X[va]), partial=True)
    return PipelineResult(model, pso_result, metrics, prep, time.perf_counter() - t0)


def _checked(fitness):
    def wrapped(position, eval_seed):
        value = fitness(position, eval_seed)
        if value is None:
            raise MetricUndefinedError("validation R^2 undefined")
        return value

    return wrapped


def run_benchmark(cfg, ds=None, baseline_overrides=None, executor=None):
    """Five baselines plus the tuned pipeline on one shared split.

    ``baseline_overrides`` maps a baseline kind to extra settings. A model that
    raises is kept as a failed row.
    """
    baseline_overrides = baseline_overrides or {}
    prep = prepare(cfg, ds)
    digest = prep.split.digest()
    tr, va = np.array(prep.split.train), np.array(prep.split.validation)
    base_X = prep.expanded.features if cfg.baselines_on_expanded else prep.standardized.features
    y = prep.raw.target

    rows = []
    for name, kind in BASELINES:
        t0 = time.perf_counter()
        try:
            bcfg = BaselineConfig(kind, baseline_overrides.get(kind, {}), derive_seed(cfg.seed, f"baseline.{kind}"))
            model = make_baseline(bcfg).fit(base_X[tr], y[tr])
            metrics = regression_metrics(y[va], model.predict(base_X[va]), partial=True)
            rows.append(ModelResult(name, metrics, wall_time=time.perf_counter() - t0))
        except Exception as exc:  # noqa: BLE001 - a failed model becomes a failed row
            log.warning("%s failed: %s", name, exc)
            rows.append(ModelResult(name, None, f"{type(exc).__name__}: {exc}", time.perf_counter() - t0))

    result = None
    t0 = time.perf_counter()
    try:
        result = run_full_pipeline(cfg, ds=prep.raw, executor=executor)
        rows.append(ModelResult(cfg.model_label, result.metrics, wall_time=result.wall_time))
    except Exception as exc:  # noqa: BLE001
        log.warning("%s failed: %s", cfg.model_label, exc)
        rows.append(ModelResult(cfg.model_label, None, f"{type(exc).__name__}: {exc}", time.perf_counter() - t0))

    metadata = {
        "seed": cfg.seed,
        "config_digest": cfg.digest(),
        "split_digest": digest,
        "model_split_digests": {r.name: digest for r in rows},
        "train_rows": len(prep.split.train),
        "validation_rows": len(prep.split.validation),
        "split_adjusted": prep.split.adjusted,
        "wall_time": {r.name: r.wall_time for r in rows},
        "failures": {r.name: r.error for r in rows if r.failed},
    }
    if result is not None:
        names = search_space(cfg).names
        metadata["best_hyperparameters"] = dict(zip(names, map(float, result.pso.best_position)))
        metadata["best_validation_r2"] = result.pso.best_fitness
    return EvalReport(rows, metadata), result


def write_benchmark_outputs(report, result, prepared_raw, out_dir):
    """Write every artifact; only ``metadata.json`` carries run-dependent timings."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [
        write_report_csv(report, out_dir / "report.csv"),
        write_report_csv(report, out_dir / "report_full.csv", decimals=None),
    ]
    if report.successful:
        written += render_bar_charts(report, out_dir)
    try:
        written.append(render_heatmap(correlation_matrix(prepared_raw), out_dir / "heatmap.svg"))
    except MetricUndefinedError as exc:
        log.warning("heatmap skipped: %s", exc)
    if result is not None:
        names = search_space_names(result)
        written.append(result.pso.write_log(out_dir / "run_log.csv", names))
    meta = out_dir / "metadata.json"
    meta.write_text(json.dumps(report.metadata, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    written.append(meta)
    return written


def search_space_names(result):
    return bilstm_search_space().names if isinstance(result.model, BiLSTMRegressor) else gbt_search_space().names
