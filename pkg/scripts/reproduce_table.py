"""Run the six-model benchmark and write every artifact to an output directory.

    python scripts/reproduce_table.py --data data/rag.csv --seed 42 --out results/
    python scripts/reproduce_table.py --data synthetic:500:42 --fast

Without --data the public dataset is used when found (RAGQ_DATASET or
data/rag.csv), otherwise a 500-row synthetic set.
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from ragq.config import PipelineConfig, load_config
from ragq.pipeline import load_data, run_benchmark, write_benchmark_outputs


def default_data():
    for candidate in (os.environ.get("RAGQ_DATASET"), "data/rag.csv"):
        if candidate and Path(candidate).is_file():
            return candidate
    return "synthetic:500:42"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", default=None)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", default="results")
    ap.add_argument("--config")
    ap.add_argument("--model", choices=("bilstm", "gbt"), default="bilstm")
    ap.add_argument("--fast", action="store_true")
    ap.add_argument("--workers", type=int, default=1, help="threads for swarm fitness evaluations")
    args = ap.parse_args()

    cfg = load_config(args.config) if args.config else PipelineConfig()
    cfg = replace(cfg, data=args.data or default_data(), seed=args.seed, output_dir=args.out, model=args.model)
    if args.fast:
        cfg = cfg.fast()
    print(f"data={cfg.data} model={cfg.model_label} swarm={cfg.pso.population}x{cfg.pso.iterations}")

    ds = load_data(cfg.data)
    if args.workers > 1:
        with ThreadPoolExecutor(args.workers) as pool:
            report, result = run_benchmark(cfg, ds, executor=pool)
    else:
        report, result = run_benchmark(cfg, ds)
    write_benchmark_outputs(report, result, ds, cfg.output_dir)

    print(f"{'Model':<16}{'MSE':>10}{'RMSE':>9}{'MAE':>9}{'MAPE':>9}{'R2':>8}")
    for r in report.rows:
        if r.failed:
            print(f"{r.name:<16}failed: {r.error}")
            continue
        m = r.metrics
        mape = "n/a" if m.mape is None else f"{m.mape:.3f}"
        r2 = "n/a" if m.r2 is None else f"{m.r2:.3f}"
        print(f"{r.name:<16}{m.mse:>10.3f}{m.rmse:>9.3f}{m.mae:>9.3f}{mape:>9}{r2:>8}")
    if result is not None:
        print("best hyperparameters:", report.metadata["best_hyperparameters"])
    print(f"artifacts in {cfg.output_dir}/")
    return 0 if report.successful else 3


if __name__ == "__main__":
    sys.exit(main())
