from __future__ import annotations

from dataclasses import dataclass, field

from .trees import AdaBoostR2, DecisionTree, ExtraTrees, GbtConfig, GradientBoostedTrees, KNeighbors

BASELINE_KINDS = ("decision_tree", "adaboost_r2", "gbdt", "extra_trees", "knn")

# Default settings per kind; overrides are validated against these keys.
DEFAULT_SETTINGS = {
    "decision_tree": {"max_depth": 6, "min_leaf_samples": 2},
    "adaboost_r2": {"n_estimators": 50, "max_depth": 3},
    "gbdt": {"learning_rate": 0.1, "n_rounds": 200, "max_depth": 3},
    "extra_trees": {"n_trees": 100, "max_depth": 10, "min_leaf_samples": 1},
    "knn": {"k": 5},
}

_POSITIVE = {"n_estimators", "n_trees", "k", "min_leaf_samples", "n_rounds", "learning_rate"}


@dataclass(frozen=True)
class BaselineConfig:
    kind: str
    settings: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in BASELINE_KINDS:
            raise ValueError(f"unknown baseline kind {self.kind!r}")
        allowed = DEFAULT_SETTINGS[self.kind]
        for key, value in self.settings.items():
            if key not in allowed:
                raise ValueError(f"{self.kind}: unknown setting {key!r}")
            if key in _POSITIVE and not value > 0:
                raise ValueError(f"{self.kind}: {key} must be positive, got {value}")
            if key == "max_depth" and value < 0:
                raise ValueError(f"{self.kind}: max_depth must be >= 0")

    def resolved(self):
        return {**DEFAULT_SETTINGS[self.kind], **self.settings}


def make_baseline(cfg):
    s = cfg.resolved()
    if cfg.kind == "decision_tree":
        return DecisionTree(**s)
    if cfg.kind == "adaboost_r2":
        return AdaBoostR2(seed=cfg.seed, **s)
    if cfg.kind == "gbdt":
        return GradientBoostedTrees(
            GbtConfig(leaf_l2=0.0, split_gain_floor=0.0, seed=cfg.seed, **s)
        )
    if cfg.kind == "extra_trees":
        return ExtraTrees(seed=cfg.seed, **s)
    return KNeighbors(**s)


def baseline_fit(X, y, cfg):
    return make_baseline(cfg).fit(X, y)
