"""Single-file model format.

Layout::

    RAGQ-MODEL 1\\n
    <one line of JSON: kind, n_features, config, array names and shapes>\\n
    <every array as little-endian float64, in header order>
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .lstm import BiLSTMRegressor
from .trees import AdaBoostR2, DecisionTree, ExtraTrees, GradientBoostedTrees, KNeighbors

MAGIC = b"RAGQ-MODEL"
VERSION = 1
MODEL_TYPES = {
    cls.kind: cls
    for cls in (BiLSTMRegressor, GradientBoostedTrees, DecisionTree, AdaBoostR2, ExtraTrees, KNeighbors)
}


def save_model(model, path):
    if not model.fitted:
        raise ValueError("cannot save an unfitted model")
    config, arrays = model.get_state()
    names = list(arrays)
    header = {
        "kind": model.kind,
        "n_features": model.n_features_,
        "config": config,
        "arrays": [[n, list(np.shape(arrays[n]))] for n in names],
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(MAGIC + b" " + str(VERSION).encode() + b"\n")
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        for n in names:
            fh.write(np.ascontiguousarray(arrays[n], dtype="<f8").tobytes())
    return path


def load_model(path):
    with Path(path).open("rb") as fh:
        magic, _, version = fh.readline().strip().partition(b" ")
        if magic != MAGIC:
            raise ValueError(f"{path}: not a model file")
        if int(version) != VERSION:
            raise ValueError(f"{path}: unsupported model format version {version.decode()}")
        header = json.loads(fh.readline())
        arrays = {}
        for name, shape in header["arrays"]:
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(8 * count)
            if len(buf) != 8 * count:
                raise ValueError(f"{path}: truncated array {name!r}")
            arrays[name] = np.frombuffer(buf, dtype="<f8").astype(np.float64).reshape(shape)
    cls = MODEL_TYPES.get(header["kind"])
    if cls is None:
        raise ValueError(f"{path}: unknown model kind {header['kind']!r}")
    model = cls.from_state(header["config"], arrays)
    model.n_features_ = header["n_features"]
    return model
