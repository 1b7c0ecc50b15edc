import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from ragq import data

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")

TABLE_CSV = """query_complexity,doc_relevance,semantic_similarity,diversity,entity_coverage,redundancy,retrieval_depth,answer_quality
4,0.57,0.685,0.353,0.819,0.70,5,54
8,0.55,0.678,0.462,0.946,0.8,6,45
6,0.55,0.44,0.665,0.658,0.54,6,49
6,0.82,0.669,0.4,0.797,0.72,7,54
3,0.75,0.54,0.536,0.823,0.69,4,62
3,0.70,0.665,0.376,0.866,0.67,7,62
2,0.64,0.352,0.587,0.724,0.57,8,62
7,0.86,0.668,0.454,0.687,0.69,8,58
"""


@pytest.fixture
def table_csv(tmp_path):
    path = tmp_path / "table.csv"
    path.write_text(TABLE_CSV)
    return path


@pytest.fixture(scope="session")
def synthetic_500():
    return data.synthesize(500, 42)


def dataset_path():
    """Location of the downloaded public dataset, if present."""
    candidates = [os.environ.get("RAGQ_DATASET"), "data/rag.csv", "data/rag_dataset.csv"]
    root = Path(__file__).resolve().parent.parent
    for c in candidates:
        if c and (Path(c).is_file() or (root / c).is_file()):
            return Path(c) if Path(c).is_file() else root / c
    return None


def tone(freqs, amps, n):
    t = np.arange(n)
    return sum(a * np.cos(2 * np.pi * f * t) for f, a in zip(freqs, amps))


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
