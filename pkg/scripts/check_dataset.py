"""Check a downloaded copy of the public RAG answer-quality CSV.

The CSV must have the columns query_complexity, doc_relevance,
semantic_similarity, diversity, entity_coverage, redundancy, retrieval_depth
and answer_quality (any order). Save it as data/rag.csv or export
RAGQ_DATASET=/path/to/file.csv so the gated acceptance tests pick it up.

    python scripts/check_dataset.py data/rag.csv
"""

import sys

from ragq import data
from ragq.metrics import correlation_matrix

PAIRS = (
    ("answer_quality", "doc_relevance", 0.66),
    ("semantic_similarity", "diversity", -0.89),
    ("redundancy", "diversity", -0.88),
)


def main(argv):
    if len(argv) != 2:
        print(__doc__)
        return 1
    ds = data.load_csv(argv[1])
    print(f"{ds.row_count} rows, {ds.features.shape[1]} features")
    m = correlation_matrix(ds)
    ok = True
    for a, b, expected in PAIRS:
        r = m.get(a, b)
        close = abs(r - expected) <= 0.03
        ok &= close
        print(f"{a} ~ {b}: {r:+.3f} (expected {expected:+.2f}) {'ok' if close else 'off'}")
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main(sys.argv))
