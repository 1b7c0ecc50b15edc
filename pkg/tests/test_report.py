import re

import numpy as np
import pytest

from ragq import data
from ragq.errors import NothingToRenderError
from ragq.metrics import CorrelationMatrix, correlation_matrix, regression_metrics
from ragq.report import (
    EvalReport,
    ModelResult,
    diverging_color,
    read_report_csv,
    render_bar_charts,
    render_heatmap,
    write_report_csv,
)

NAMES = ["DecisionTrees", "AdaBoost", "GBDT", "ExtraTrees", "KNN", "VMD-PSO-BiLSTM"]


def _report(n=6, failed=()):
    rng = np.random.default_rng(0)
    y = rng.uniform(40, 70, 30)
    rows = []
    for k, name in enumerate(NAMES[:n]):
        if name in failed:
            rows.append(ModelResult(name, None, "boom"))
        else:
            rows.append(ModelResult(name, regression_metrics(y, y + rng.normal(0, 1 + k, 30))))
    return EvalReport(rows)


def test_color_scale_anchors():
    assert diverging_color(1.0) == "#b2182b"
    assert diverging_color(-1.0) == "#2166ac"
    assert diverging_color(0.0) == "#f7f7f7"
    assert diverging_color(3.0) == diverging_color(1.0)


def test_heatmap_structure(tmp_path):
    m = correlation_matrix(data.synthesize(100, 0))
    path = render_heatmap(m, tmp_path / "heat.svg")
    svg = path.read_text()
    assert svg.count('<rect class="cell"') == 64
    assert svg.count('<text class="value"') == 64
    for label in m.labels:
        assert f">{label}<" in svg
    assert path.with_suffix(".csv").exists()


def test_heatmap_identity_diagonal(tmp_path):
    labels = tuple(data.SCHEMA.columns)
    svg = render_heatmap(CorrelationMatrix(labels, np.eye(8)), tmp_path / "eye.svg").read_text()
    fills = re.findall(r'<rect class="cell"[^>]*fill="(#[0-9a-f]{6})"', svg)
    assert len(fills) == 64
    for i in range(8):
        for j in range(8):
            assert fills[8 * i + j] == ("#b2182b" if i == j else "#f7f7f7")
    assert svg.count(">1.00<") == 8 and svg.count(">0.00<") == 56


def test_heatmap_annotation_precision(tmp_path):
    svg = render_heatmap(correlation_matrix(data.embedded_sample()), tmp_path / "h.svg").read_text()
    assert ">0.53<" in svg


def test_bar_charts(tmp_path):
    paths = render_bar_charts(_report(), tmp_path)
    svgs = sorted(p.name for p in paths if p.suffix == ".svg")
    assert svgs == ["bars_mae.svg", "bars_mape.svg", "bars_mse.svg", "bars_r2.svg", "bars_rmse.svg"]
    for p in paths:
        if p.suffix == ".svg":
            text = p.read_text()
            assert text.count('<rect class="bar"') == 6
            for name in NAMES:
                assert f">{name}<" in text
    table = (tmp_path / "table.csv").read_text().splitlines()
    assert table[0] == "Model,MSE,RMSE,MAE,MAPE,R2"
    assert [line.split(",")[0] for line in table[1:]] == NAMES


def test_single_row(tmp_path):
    paths = render_bar_charts(_report(1), tmp_path)
    svgs = [p for p in paths if p.suffix == ".svg"]
    assert len(svgs) == 5
    assert all(p.read_text().count('<rect class="bar"') == 1 for p in svgs)


def test_failed_rows_skipped_in_charts(tmp_path):
    paths = render_bar_charts(_report(failed=("KNN",)), tmp_path)
    assert paths[0].read_text().count('<rect class="bar"') == 5


def test_nothing_to_render(tmp_path):
    with pytest.raises(NothingToRenderError):
        render_bar_charts(_report(failed=tuple(NAMES)), tmp_path)


def test_report_csv_round_trip(tmp_path):
    report = _report(failed=("AdaBoost",))
    short = read_report_csv(write_report_csv(report, tmp_path / "r.csv"))
    full = read_report_csv(write_report_csv(report, tmp_path / "f.csv", decimals=None))
    assert [r.name for r in short.rows] == NAMES
    assert short.row("AdaBoost").failed
    for r in short.successful:
        assert abs(np.sqrt(r.metrics.mse) - r.metrics.rmse) <= 0.001
    for r in full.successful:
        assert r.metrics.rmse**2 == pytest.approx(r.metrics.mse, rel=1e-6)
        assert r.metrics == report.row(r.name).metrics
    line = (tmp_path / "r.csv").read_text().splitlines()[2]
    assert line == "AdaBoost,,,,,"


def test_three_decimals(tmp_path):
    text = write_report_csv(_report(1), tmp_path / "r.csv").read_text().splitlines()[1]
    assert all(re.fullmatch(r"-?\d+\.\d{3}", c) for c in text.split(",")[1:])


def test_read_rejects_bad_header(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("Name,A\n")
    with pytest.raises(ValueError):
        read_report_csv(path)
