"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL/SKIP line (shown at the end of the run and,
with ``-s``, as it happens). Runtime budgets are asserted alongside results.
Criteria 1 and 3 need the public dataset; point RAGQ_DATASET at the CSV or
place it at data/rag.csv. Set RAGQ_ACCEPTANCE_FAST=1 to run criterion 3 with
the reduced swarm.
"""

import math
import os
import time
from contextlib import contextmanager

import numpy as np
import pytest

from ragq import data
from ragq.cli import main as cli_main
from ragq.config import PipelineConfig
from ragq.metrics import correlation_matrix, pearson_corr, regression_metrics
from ragq.pipeline import run_benchmark
from ragq.pso import SearchSpace, SwarmConfig, optimize
from ragq.regressors import GbtConfig, gbt_fit, lstm
from ragq.report import read_report_csv
from ragq.vmd import VmdConfig, decompose, reconstruct

from .conftest import ACCEPTANCE_LINES, dataset_path, tone

TABLE_MSE_RMSE = {
    "DecisionTrees": (30.728, 5.543),
    "AdaBoost": (17.712, 4.209),
    "GBDT": (15.804, 3.975),
    "ExtraTrees": (16.230, 4.029),
    "KNN": (66.250, 8.139),
    "VMD-PSO-BiLSTM": (12.230, 3.498),
}


def _record(line):
    ACCEPTANCE_LINES.append(line)
    print(line)


@contextmanager
def criterion(number, title, budget, spent=0.0):
    t0 = time.perf_counter() - spent
    try:
        yield
        elapsed = time.perf_counter() - t0
        assert elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"
    except pytest.skip.Exception as exc:
        _record(f"criterion {number}: SKIP  {title} ({exc.msg})")
        raise
    except BaseException as exc:
        _record(f"criterion {number}: FAIL  {title} ({type(exc).__name__}: {str(exc).splitlines()[0][:120]})")
        raise
    _record(f"criterion {number}: PASS  {title} ({time.perf_counter() - t0:.1f}s)")


def _require_dataset():
    path = dataset_path()
    if path is None:
        msg = "public dataset not found; set RAGQ_DATASET or place it at data/rag.csv"
        print(f"NOTICE: {msg}")
        pytest.skip(msg)
    return path


def test_criterion_01_correlations():
    with criterion(1, "correlation reproduction on the public dataset", 5):
        path = _require_dataset()
        m = correlation_matrix(data.load_csv(path))
        assert m.get("answer_quality", "doc_relevance") == pytest.approx(0.66, abs=0.03)
        assert m.get("semantic_similarity", "diversity") == pytest.approx(-0.89, abs=0.03)
        assert m.get("redundancy", "diversity") == pytest.approx(-0.88, abs=0.03)


def test_criterion_02_published_rmse_identity():
    with criterion(2, "sqrt(MSE) matches RMSE for every published row", 1):
        for name, (mse, rmse) in TABLE_MSE_RMSE.items():
            assert abs(math.sqrt(mse) - rmse) <= 0.001, name
        rng = np.random.default_rng(2)
        for _ in range(200):
            n = int(rng.integers(2, 60))
            y = rng.uniform(1, 100, n)
            m = regression_metrics(y, y + rng.normal(0, rng.uniform(0.1, 20), n))
            assert abs(math.sqrt(m.mse) - m.rmse) <= 1e-9 * max(1.0, m.rmse)


@pytest.mark.slow
def test_criterion_03_ordering_on_public_dataset():
    fast = os.environ.get("RAGQ_ACCEPTANCE_FAST") == "1"
    with criterion(3, "tuned pipeline beats KNN and DecisionTrees on R2", 180 if fast else 1800):
        path = _require_dataset()
        cfg = PipelineConfig(data=str(path), seed=42)
        assert (cfg.pso.population, cfg.pso.iterations, cfg.vmd.n_modes) == (10, 15, 5)
        assert (cfg.vmd.alpha, cfg.vmd.tau, cfg.vmd.tolerance, cfg.split_fraction) == (356, 0, 1e-7, 0.8)
        report, _ = run_benchmark(cfg.fast() if fast else cfg)
        proposed = report.row(cfg.model_label).metrics.r2
        assert proposed > report.row("KNN").metrics.r2
        assert proposed > report.row("DecisionTrees").metrics.r2


def test_criterion_04_tone_recovery():
    with criterion(4, "VMD recovers one and two tones", 10):
        one = decompose(tone([0.05], [1.0], 500), VmdConfig(n_modes=1))
        assert abs(one.omegas[0] - 0.05) / 0.05 < 0.02
        s = tone([0.04, 0.20], [1.0, 0.8], 1000)
        two = decompose(s, VmdConfig(n_modes=2))
        for got, want in zip(two.omegas, (0.04, 0.20)):
            assert abs(got - want) / want < 0.05
        rel = np.sqrt(np.mean((reconstruct(two) - s) ** 2)) / np.sqrt(np.mean(s**2))
        assert rel < 0.05


def test_criterion_05_vmd_termination_and_shape():
    with criterion(5, "VMD output shape, ordering and termination on 50 cases", 30):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(8, 400))
            cfg = VmdConfig(
                alpha=float(rng.uniform(10, 5000)),
                n_modes=int(rng.integers(1, 7)),
                max_iterations=int(rng.integers(1, 500)),
                omega_init=str(rng.choice(["uniform_spread", "zero", "random"])),
                seed=int(rng.integers(2**31)),
            )
            out = decompose(rng.standard_normal(n), cfg)
            assert out.modes.shape == (cfg.n_modes, n)
            assert np.all(np.diff(out.omegas) >= 0)
            assert out.omegas.min() >= 0 and out.omegas.max() <= 0.5
            assert out.iterations_used <= cfg.max_iterations
            if out.iterations_used < cfg.max_iterations:
                assert out.final_update_norm <= 1e-7


def test_criterion_06_pso_sphere():
    with criterion(6, "PSO converges on the sphere for 5 seeds", 5):
        space = SearchSpace((-5, -5, -5), (5, 5, 5))
        lo, hi = np.array(space.lower), np.array(space.upper)
        for seed in range(1, 6):
            seen = []

            def sphere(x, s):
                seen.append(np.array(x))
                return -float(np.sum(x**2))

            res = optimize(space, sphere, SwarmConfig(population=20, iterations=60), seed=seed)
            assert res.best_fitness > -0.01
            assert np.all(np.diff(res.best_history) >= 0)
            assert all(np.all(x >= lo) and np.all(x <= hi) for x in seen)


def test_criterion_07_bilstm_gradient_check():
    with criterion(7, "BiLSTM gradients match central differences", 10):
        rng = np.random.default_rng(7)
        params = lstm.init_params(5, 3, rng)
        seq = rng.normal(size=(2, 7, 5))
        y = rng.normal(size=2)
        _, grads = lstm.loss_and_grad(params, seq, y, 1e-3)
        eps = 1e-5
        for name in lstm.PARAM_NAMES:
            arr = params[name]
            for idx in np.ndindex(arr.shape):
                orig = arr[idx]
                arr[idx] = orig + eps
                up = lstm.loss_and_grad(params, seq, y, 1e-3)[0]
                arr[idx] = orig - eps
                down = lstm.loss_and_grad(params, seq, y, 1e-3)[0]
                arr[idx] = orig
                num = (up - down) / (2 * eps)
                ana = grads[name][idx]
                assert abs(num - ana) <= 1e-4 * max(abs(num) + abs(ana), 1e-7), (name, idx)


def test_criterion_08_gbt_oracles():
    with criterion(8, "GBT base score, memorization and monotone loss", 10):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(100, 4))
        y = X[:, 0] ** 2 - X[:, 1] + 0.5 * np.sin(3 * X[:, 2]) + rng.normal(0, 0.1, 100)
        base = gbt_fit(X, y, GbtConfig(n_rounds=0)).predict(X)
        assert np.all(base == base[0]) and base[0] == pytest.approx(y.mean(), abs=1e-12)

        Xd = rng.permutation(16).reshape(-1, 1) + rng.uniform(0, 0.5, (16, 1))
        yd = rng.normal(size=16)
        depth = math.ceil(math.log2(16))
        memo = gbt_fit(Xd, yd, GbtConfig(learning_rate=1.0, max_depth=16, leaf_l2=0, n_rounds=1))
        assert memo.config.max_depth >= depth
        np.testing.assert_allclose(memo.predict(Xd), yd, atol=1e-12)

        model = gbt_fit(X, y, GbtConfig(n_rounds=100))
        assert len(model.loss_history) == 101
        assert np.all(np.diff(model.loss_history) <= 1e-12)


def test_criterion_09_metric_oracles():
    with criterion(9, "hand-computed metrics and Pearson identities", 1):
        m = regression_metrics([50, 60], [55, 55])
        expected = (25, 5, 5, 100 / 2 * (5 / 50 + 5 / 60), 0)
        for got, want in zip(m.as_tuple(), expected):
            assert abs(got - want) <= 1e-9
        assert abs(m.mape - 9.1667) < 1e-4
        rng = np.random.default_rng(9)
        x, z = rng.normal(size=40), rng.normal(size=40)
        assert abs(pearson_corr(x, x) - 1) <= 1e-12
        assert abs(pearson_corr([1, 2, 3], [3, 2, 1]) + 1) <= 1e-12
        r = pearson_corr(x, z)
        assert abs(pearson_corr(3.5 * x - 7, z) - r) <= 1e-12
        assert abs(pearson_corr(-2 * x + 1, z) + r) <= 1e-12


@pytest.fixture(scope="module")
def twin_benchmarks(tmp_path_factory):
    root = tmp_path_factory.mktemp("determinism")
    t0 = time.perf_counter()
    codes = []
    for run in ("first", "second"):
        argv = ["benchmark", "--data", "synthetic:500:42", "--seed", "42", "--fast", "--out", str(root / run)]
        codes.append(cli_main(argv))
    return root / "first", root / "second", codes, time.perf_counter() - t0


@pytest.mark.slow
def test_criterion_10_end_to_end_determinism(twin_benchmarks):
    first, second, codes, elapsed = twin_benchmarks
    with criterion(10, "two seeded benchmark runs give identical files", 180, spent=elapsed):
        assert codes == [0, 0]
        compared = 0
        for path in sorted(first.iterdir()):
            if path.name == "metadata.json":
                continue
            assert path.read_bytes() == (second / path.name).read_bytes(), path.name
            compared += 1
        assert (first / "report.csv").exists()
        assert len(list(first.glob("bars_*.svg"))) == 5 and (first / "heatmap.svg").exists()
        assert compared >= 9


@pytest.mark.slow
def test_knn_not_top_on_synthetic(twin_benchmarks):
    report = read_report_csv(twin_benchmarks[0] / "report.csv")
    assert len(report.rows) == 6
    best = max(report.successful, key=lambda r: r.metrics.r2)
    assert best.name != "KNN"
