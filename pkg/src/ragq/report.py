"""Benchmark report tables and SVG figures (heatmap, per-metric bar charts)."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import NothingToRenderError
from .metrics import METRIC_NAMES, MetricsRow

# blue -> near-white -> red
_NEG = (33, 102, 172)
_MID = (247, 247, 247)
_POS = (178, 24, 43)
_BAR_COLORS = ("#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1")


@dataclass
class ModelResult:
    name: str
    metrics: MetricsRow | None = None
    error: str | None = None
    wall_time: float = 0.0

    @property
    def failed(self):
        return self.metrics is None


@dataclass
class EvalReport:
    rows: list
    metadata: dict = field(default_factory=dict)

    def row(self, name):
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def successful(self):
        return [r for r in self.rows if not r.failed]


def diverging_color(v):
    v = min(1.0, max(-1.0, float(v)))
    lo, hi, t = (_MID, _POS, v) if v >= 0 else (_MID, _NEG, -v)
    rgb = (round(a + (b - a) * t) for a, b in zip(lo, hi))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _write(path, lines):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def render_heatmap(matrix, path):
    """Annotated correlation heatmap as SVG, plus the matrix as a sidecar CSV."""
    labels = matrix.labels
    n = len(labels)
    cell, left, top = 64, 170, 20
    width = left + n * cell + 20
    height = top + n * cell + 170
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="12">',
        '<title>Correlation heatmap</title>',
    ]
    for i in range(n):
        y = top + i * cell
        out.append(
            f'<text class="ylabel" x="{left - 6}" y="{y + cell / 2 + 4:.1f}" '
            f'text-anchor="end">{escape(labels[i])}</text>'
        )
        for j in range(n):
            v = float(matrix.values[i, j])
            x = left + j * cell
            ink = "#ffffff" if abs(v) > 0.6 else "#000000"
            out.append(
                f'<rect class="cell" x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{diverging_color(v)}" stroke="#ffffff"/>'
            )
            out.append(
                f'<text class="value" x="{x + cell / 2:.1f}" y="{y + cell / 2 + 4:.1f}" '
                f'text-anchor="middle" fill="{ink}">{v:.2f}</text>'
            )
    base = top + n * cell + 8
    for j, label in enumerate(labels):
        x = left + j * cell + cell / 2
        out.append(
            f'<text class="xlabel" x="{x:.1f}" y="{base}" text-anchor="end" '
            f'transform="rotate(-45 {x:.1f} {base})">{escape(label)}</text>'
        )
    out.append("</svg>")
    path = _write(path, out)
    matrix.to_csv(Path(path).with_suffix(".csv"))
    return path


def _nice_max(v):
    if v <= 0:
        return 1.0
    exp = 10 ** math.floor(math.log10(v))
    for step in (1, 2, 2.5, 5, 10):
        if step * exp >= v:
            return step * exp
    return 10 * exp


def _bar_svg(metric, names, values):
    width, height = 120 + 90 * len(names), 380
    left, top, plot_h = 60, 40, 240
    hi = _nice_max(max(max(values), 0.0))
    lo = -_nice_max(-min(min(values), 0.0)) if min(values) < 0 else 0.0
    scale = plot_h / (hi - lo)
    zero_y = top + hi * scale
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="12">',
        f'<title>{escape(metric)}</title>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(metric)}</text>',
        f'<line x1="{left}" y1="{zero_y:.1f}" x2="{width - 20}" y2="{zero_y:.1f}" stroke="#333333"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="#333333"/>',
        f'<text x="{left - 4}" y="{top + 4}" text-anchor="end">{hi:g}</text>',
        f'<text x="{left - 4}" y="{top + plot_h + 4}" text-anchor="end">{lo:g}</text>',
    ]
    for k, (name, v) in enumerate(zip(names, values)):
        x = left + 20 + 90 * k
        y0, y1 = sorted((zero_y, zero_y - v * scale))
        out.append(
            f'<rect class="bar" x="{x}" y="{y0:.2f}" width="60" height="{y1 - y0:.2f}" '
            f'fill="{_BAR_COLORS[k % len(_BAR_COLORS)]}"/>'
        )
        ty = y0 - 5 if v >= 0 else y1 + 14
        out.append(f'<text class="value" x="{x + 30}" y="{ty:.2f}" text-anchor="middle">{v:.3f}</text>')
        lx, ly = x + 30, top + plot_h + 18
        out.append(
            f'<text class="label" x="{lx}" y="{ly}" text-anchor="end" '
            f'transform="rotate(-30 {lx} {ly})">{escape(name)}</text>'
        )
    out.append("</svg>")
    return out


def render_bar_charts(report, out_dir):
    """One bar chart per metric plus ``table.csv``; failed models are left out."""
    rows = report.successful
    if not rows:
        raise NothingToRenderError("every model in the report failed")
    out_dir = Path(out_dir)
    names = [r.name for r in rows]
    paths = []
    for idx, metric in enumerate(METRIC_NAMES):
        values = [r.metrics.as_tuple()[idx] for r in rows]
        values = [float("nan") if v is None else v for v in values]
        finite = [0.0 if math.isnan(v) else v for v in values]
        paths.append(_write(out_dir / f"bars_{metric.lower()}.svg", _bar_svg(metric, names, finite)))
    paths.append(write_report_csv(EvalReport(rows), out_dir / "table.csv"))
    return paths


def _cell(v, decimals):
    if v is None:
        return ""
    return f"{v:.{decimals}f}" if decimals is not None else repr(float(v))


def write_report_csv(report, path, decimals=3):
    """``Model,MSE,RMSE,MAE,MAPE,R2``; ``decimals=None`` keeps full precision.

    Failed models keep their row with empty metric cells.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["Model", *METRIC_NAMES])
        for r in report.rows:
            values = r.metrics.as_tuple() if r.metrics else (None,) * 5
            w.writerow([r.name, *(_cell(v, decimals) for v in values)])
    return path


def read_report_csv(path):
    rows = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["Model", *METRIC_NAMES]:
            raise ValueError(f"{path}: unexpected header {header}")
        for rec in reader:
            cells = [float(c) if c else None for c in rec[1:]]
            metrics = None if cells[0] is None else MetricsRow(*cells)
            rows.append(ModelResult(rec[0], metrics, None if metrics else "failed"))
    return EvalReport(rows)
