"""Command line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import data as data_mod
from .config import PipelineConfig, load_config
from .errors import ConfigurationError, DataError, RagqError
from .metrics import correlation_matrix
from .pipeline import load_data, run_benchmark, run_full_pipeline, search_space, write_benchmark_outputs
from .report import render_heatmap
from .vmd import expand_features

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3
log = logging.getLogger("ragq")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--data", help="CSV path, 'embedded', or 'synthetic:<rows>'")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--seed", type=int)
    common.add_argument("--config", help="file of 'section.key = value' overrides")
    common.add_argument("--fast", action="store_true", help="small swarm and few epochs")

    parser = _Parser(prog="ragq", description="VMD + PSO answer-quality regression benchmark")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    sub.add_parser("analyze", parents=[common], help="correlation matrix and heatmap")
    sub.add_parser("decompose", parents=[common], help="VMD-expand a dataset to CSV")
    sub.add_parser("tune", parents=[common], help="PSO search only; print best hyperparameters")
    sub.add_parser("benchmark", parents=[common], help="five baselines vs the tuned pipeline")
    synth = sub.add_parser("synth", parents=[common], help="write a synthetic dataset")
    synth.add_argument("--rows", type=int, default=500)
    return parser


def _config(args):
    cfg = PipelineConfig()
    if args.config:
        cfg = load_config(args.config, cfg)
    if args.data:
        cfg = replace(cfg, data=args.data)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out:
        cfg = replace(cfg, output_dir=args.out)
    if args.fast:
        cfg = cfg.fast()
    return cfg


def _cmd_analyze(cfg, args):
    ds = load_data(cfg.data)
    m = correlation_matrix(ds)
    out = Path(cfg.output_dir)
    path = render_heatmap(m, out / "heatmap.svg")
    print(f"wrote {path} and {path.with_suffix('.csv')}")
    for a, b in (("answer_quality", "doc_relevance"), ("semantic_similarity", "diversity"), ("redundancy", "diversity")):
        print(f"{a} ~ {b}: {m.get(a, b):+.3f}")


def _cmd_decompose(cfg, args):
    ds = load_data(cfg.data)
    std, _ = data_mod.standardize(ds)
    expanded, outputs = expand_features(std, cfg.vmd, return_outputs=True)
    out = Path(args.out or Path(cfg.output_dir) / "expanded.csv")
    data_mod.save_csv(expanded, out)
    sidecar = out.with_name(out.stem + ".omegas.csv")
    with sidecar.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature", *(f"omega_m{k}" for k in range(1, cfg.vmd.n_modes + 1)), "iterations"])
        for name, o in outputs.items():
            w.writerow([name, *(repr(float(v)) for v in o.omegas), o.iterations_used])
    print(f"wrote {out} ({expanded.features.shape[1]} feature columns) and {sidecar}")


def _cmd_tune(cfg, args):
    result = run_full_pipeline(cfg)
    for name, value in zip(search_space(cfg).names, result.pso.best_position):
        print(f"{name} = {value:.6g}")
    print(f"validation_r2 = {result.pso.best_fitness:.6f}")
    if args.out:
        result.pso.write_log(Path(cfg.output_dir) / "run_log.csv", search_space(cfg).names)


def _cmd_benchmark(cfg, args):
    ds = load_data(cfg.data)
    report, result = run_benchmark(cfg, ds)
    written = write_benchmark_outputs(report, result, ds, cfg.output_dir)
    width = max(len(r.name) for r in report.rows)
    print(f"{'Model':<{width}}  {'MSE':>9} {'RMSE':>8} {'MAE':>8} {'MAPE':>8} {'R2':>7}")
    for r in report.rows:
        if r.failed:
            print(f"{r.name:<{width}}  failed: {r.error}")
            continue
        m = r.metrics
        fmt = lambda v: "   n/a" if v is None else f"{v:.3f}"  # noqa: E731
        print(f"{r.name:<{width}}  {m.mse:9.3f} {m.rmse:8.3f} {m.mae:8.3f} {fmt(m.mape):>8} {fmt(m.r2):>7}")
    print(f"wrote {len(written)} files to {cfg.output_dir}")
    if not report.successful:
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_synth(cfg, args):
    seed = args.seed if args.seed is not None else 0
    ds = data_mod.synthesize(args.rows, seed)
    out = Path(args.out or "synthetic.csv")
    data_mod.save_csv(ds, out)
    print(f"wrote {ds.row_count} rows to {out}")


COMMANDS = {
    "analyze": _cmd_analyze,
    "decompose": _cmd_decompose,
    "tune": _cmd_tune,
    "benchmark": _cmd_benchmark,
    "synth": _cmd_synth,
}


def main(argv=None):
    level = os.environ.get("RAGQ_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr, end="")
        return EXIT_USAGE
    except ConfigurationError as exc:
        print(f"ragq: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ragq: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        return COMMANDS[args.command](cfg, args) or EXIT_OK
    except (DataError, OSError) as exc:
        print(f"ragq: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (RagqError, ValueError, ArithmeticError) as exc:
        print(f"ragq: {args.command} failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
