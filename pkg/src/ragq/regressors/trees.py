"""Regression trees grown on gradient/Hessian statistics, and the ensembles built on them.

One grower covers every tree model here. With gradients ``g`` and Hessians
``h`` a leaf predicts ``-sum(g) / (sum(h) + lam)`` and a split scores

    0.5 * (GL**2/(HL+lam) + GR**2/(HR+lam) - G**2/(H+lam)) - gamma

Plain variance-reduction trees are the special case ``g = -w*y``, ``h = w``,
``lam = gamma = 0``: leaves become (weighted) means.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .base import Regressor, check_xy


@dataclass
class Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self):
        return self.feature.shape[0]

    @property
    def depth(self):
        depth = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def predict(self, X):
        node = np.zeros(X.shape[0], dtype=np.intp)
        active = self.feature[node] >= 0
        while np.any(active):
            rows = np.nonzero(active)[0]
            n = node[rows]
            go_left = X[rows, self.feature[n]] <= self.threshold[n]
            node[rows] = np.where(go_left, self.left[n], self.right[n])
            active = self.feature[node] >= 0
        return self.value[node]

    def arrays(self, prefix):
        return {
            f"{prefix}.feature": self.feature.astype(np.float64),
            f"{prefix}.threshold": self.threshold,
            f"{prefix}.left": self.left.astype(np.float64),
            f"{prefix}.right": self.right.astype(np.float64),
            f"{prefix}.value": self.value,
        }

    @classmethod
    def from_arrays(cls, arrays, prefix):
        ints = lambda k: arrays[f"{prefix}.{k}"].astype(np.intp)  # noqa: E731
        return cls(
            ints("feature"),
            arrays[f"{prefix}.threshold"].copy(),
            ints("left"),
            ints("right"),
            arrays[f"{prefix}.value"].copy(),
        )


def _exact_split(x, g, h, G, H, lam, min_leaf):
    order = np.argsort(x, kind="stable")
    xs = x[order]
    GL = np.cumsum(g[order])[:-1]
    HL = np.cumsum(h[order])[:-1]
    n = xs.shape[0]
    counts = np.arange(1, n)
    ok = (xs[:-1] < xs[1:]) & (counts >= min_leaf) & (n - counts >= min_leaf)
    if not np.any(ok):
        return None
    GR, HR = G - GL, H - HL
    score = GL**2 / (HL + lam) + GR**2 / (HR + lam)
    score = np.where(ok, score, -np.inf)
    i = int(np.argmax(score))
    lo, hi = xs[i], xs[i + 1]
    thr = 0.5 * (lo + hi)
    if not lo <= thr < hi:
        thr = lo
    return score[i], thr


def _random_split(x, g, h, G, H, lam, min_leaf, rng):
    lo, hi = x.min(), x.max()
    if lo == hi:
        return None
    thr = rng.uniform(lo, hi)
    mask = x <= thr
    nl = int(mask.sum())
    if nl < min_leaf or x.shape[0] - nl < min_leaf:
        return None
    GL, HL = g[mask].sum(), h[mask].sum()
    return GL**2 / (HL + lam) + (G - GL) ** 2 / (H - HL + lam), thr


def grow_tree(X, g, h, max_depth, lam=0.0, gamma=0.0, min_leaf=1, rng=None):
    """Greedy depth-first growth; ``rng`` switches to one random threshold per feature.

    A node splits only when its best gain is strictly positive. Ties go to the
    lowest feature index, then the lowest threshold.
    """
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        for lst, v in ((feature, -1), (threshold, 0.0), (left, -1), (right, -1), (value, 0.0)):
            lst.append(v)
        return len(feature) - 1

    root = new_node()
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        gi, hi = g[idx], h[idx]
        G, H = gi.sum(), hi.sum()
        value[node] = -G / (H + lam)
        if depth >= max_depth or idx.shape[0] < 2 * min_leaf:
            continue
        parent = G**2 / (H + lam)
        best = None
        for j in range(X.shape[1]):
            if rng is None:
                found = _exact_split(X[idx, j], gi, hi, G, H, lam, min_leaf)
            else:
                found = _random_split(X[idx, j], gi, hi, G, H, lam, min_leaf, rng)
            if found is None:
                continue
            gain = 0.5 * (found[0] - parent) - gamma
            if best is None or gain > best[0]:
                best = (gain, j, found[1])
        if best is None or not best[0] > 0:
            continue
        _, j, thr = best
        mask = X[idx, j] <= thr
        l, r = new_node(), new_node()
        feature[node], threshold[node], left[node], right[node] = j, thr, l, r
        # push right first so the left subtree gets the lower node ids
        stack.append((r, idx[~mask], depth + 1))
        stack.append((l, idx[mask], depth + 1))

    return Tree(
        np.array(feature, dtype=np.intp),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.intp),
        np.array(right, dtype=np.intp),
        np.array(value, dtype=np.float64),
    )


def _trees_state(trees):
    arrays = {}
    for t, tree in enumerate(trees):
        arrays.update(tree.arrays(f"tree{t}"))
    return arrays


def _trees_from_state(arrays, count):
    return [Tree.from_arrays(arrays, f"tree{t}") for t in range(count)]


# --- gradient boosting ----------------------------------------------------


@dataclass(frozen=True)
class GbtConfig:
    learning_rate: float = 0.3
    max_depth: int = 6
    leaf_l2: float = 1.0
    split_gain_floor: float = 0.0
    n_rounds: int = 100
    min_leaf_samples: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if self.max_depth < 0 or self.n_rounds < 0 or self.min_leaf_samples < 1:
            raise ValueError("max_depth, n_rounds must be >= 0 and min_leaf_samples >= 1")
        if self.leaf_l2 < 0 or self.split_gain_floor < 0:
            raise ValueError("leaf_l2 and split_gain_floor must be >= 0")


class GradientBoostedTrees(Regressor):
    """Newton boosting on squared loss (halved): g = pred - y, h = 1."""

    kind = "gbt"

    def __init__(self, config=None):
        self.config = config or GbtConfig()
        self.trees = []
        self.base_score = 0.0
        self.loss_history = []

    def _fit(self, X, y):
        cfg = self.config
        self.base_score = float(y.mean())
        pred = np.full(y.shape[0], self.base_score)
        h = np.ones_like(y)
        self.trees = []
        self.loss_history = [float(np.mean((y - pred) ** 2))]
        for _ in range(cfg.n_rounds):
            tree = grow_tree(
                X, pred - y, h, cfg.max_depth, cfg.leaf_l2, cfg.split_gain_floor, cfg.min_leaf_samples
            )
            self.trees.append(tree)
            pred = pred + cfg.learning_rate * tree.predict(X)
            self.loss_history.append(float(np.mean((y - pred) ** 2)))

    def _predict(self, X):
        out = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            out += self.config.learning_rate * tree.predict(X)
        return out

    def get_state(self):
        arrays = _trees_state(self.trees)
        arrays["base_score"] = np.array([self.base_score])
        return {**asdict(self.config), "n_trees": len(self.trees)}, arrays

    @classmethod
    def from_state(cls, config, arrays):
        config = dict(config)
        n = config.pop("n_trees")
        model = cls(GbtConfig(**config))
        model.base_score = float(arrays["base_score"][0])
        model.trees = _trees_from_state(arrays, n)
        return model


def gbt_fit(X, y, cfg=None):
    return GradientBoostedTrees(cfg).fit(X, y)


# --- baselines ------------------------------------------------------------


class DecisionTree(Regressor):
    kind = "decision_tree"

    def __init__(self, max_depth=6, min_leaf_samples=2):
        self.max_depth = max_depth
        self.min_leaf_samples = min_leaf_samples
        self.tree = None

    def _fit(self, X, y):
        self.tree = grow_tree(X, -y, np.ones_like(y), self.max_depth, min_leaf=self.min_leaf_samples)

    def _predict(self, X):
        return self.tree.predict(X)

    def get_state(self):
        config = {"max_depth": self.max_depth, "min_leaf_samples": self.min_leaf_samples}
        return config, self.tree.arrays("tree0")

    @classmethod
    def from_state(cls, config, arrays):
        model = cls(**config)
        model.tree = Tree.from_arrays(arrays, "tree0")
        return model


class ExtraTrees(Regressor):
    """Average of trees whose splits use one uniform random threshold per feature."""

    kind = "extra_trees"

    def __init__(self, n_trees=100, max_depth=10, min_leaf_samples=1, seed=0):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf_samples = min_leaf_samples
        self.seed = seed
        self.trees = []

    def _fit(self, X, y):
        ones = np.ones_like(y)
        streams = np.random.SeedSequence(self.seed).spawn(self.n_trees)
        self.trees = [
            grow_tree(X, -y, ones, self.max_depth, min_leaf=self.min_leaf_samples, rng=np.random.default_rng(s))
            for s in streams
        ]

    def _predict(self, X):
        return np.mean([t.predict(X) for t in self.trees], axis=0)

    def get_state(self):
        config = {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_leaf_samples": self.min_leaf_samples,
            "seed": self.seed,
        }
        return config, _trees_state(self.trees)

    @classmethod
    def from_state(cls, config, arrays):
        model = cls(**config)
        model.trees = _trees_from_state(arrays, config["n_trees"])
        return model


class AdaBoostR2(Regressor):
    """AdaBoost.R2 with linear loss and weighted-median aggregation.

    Each round grows a weighted tree directly on the sample weights rather
    than on a weighted resample, so fitting is deterministic.
    """

    kind = "adaboost_r2"

    def __init__(self, n_estimators=50, max_depth=3, seed=0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.seed = seed
        self.trees = []
        self.estimator_weights = np.zeros(0)

    def _fit(self, X, y):
        n = y.shape[0]
        w = np.full(n, 1.0 / n)
        trees, alphas = [], []
        for _ in range(self.n_estimators):
            tree = grow_tree(X, -w * y, w, self.max_depth)
            err = np.abs(tree.predict(X) - y)
            emax = err.max()
            if emax == 0:
                trees.append(tree)
                alphas.append(1.0 if not alphas else max(alphas))
                break
            loss = err / emax
            avg = float(np.sum(w * loss))
            if avg >= 0.5:
                if not trees:
                    trees.append(tree)
                    alphas.append(1.0)
                break
            beta = avg / (1.0 - avg)
            trees.append(tree)
            alphas.append(np.log(1.0 / beta))
            w = w * beta ** (1.0 - loss)
            w = w / w.sum()
        self.trees = trees
        self.estimator_weights = np.array(alphas)

    def _predict(self, X):
        preds = np.array([t.predict(X) for t in self.trees]).T  # (M, T)
        order = np.argsort(preds, axis=1, kind="stable")
        sorted_w = self.estimator_weights[order]
        cum = np.cumsum(sorted_w, axis=1)
        pick = np.argmax(cum >= 0.5 * cum[:, -1:], axis=1)
        cols = order[np.arange(X.shape[0]), pick]
        return preds[np.arange(X.shape[0]), cols]

    def get_state(self):
        arrays = _trees_state(self.trees)
        arrays["estimator_weights"] = self.estimator_weights
        config = {
            "n_estimators": self.n_estimators,
            "max_depth": self.max_depth,
            "seed": self.seed,
            "n_trees": len(self.trees),
        }
        return config, arrays

    @classmethod
    def from_state(cls, config, arrays):
        config = dict(config)
        n = config.pop("n_trees")
        model = cls(**config)
        model.trees = _trees_from_state(arrays, n)
        model.estimator_weights = arrays["estimator_weights"].copy()
        return model


class KNeighbors(Regressor):
    kind = "knn"

    def __init__(self, k=5):
        self.k = k
        self.X_ = None
        self.y_ = None

    def _min_rows(self):
        return max(2, self.k)

    def _fit(self, X, y):
        self.X_, self.y_ = X.copy(), y.copy()

    def _predict(self, X, chunk=256):
        out = np.empty(X.shape[0])
        for start in range(0, X.shape[0], chunk):
            q = X[start : start + chunk]
            d2 = ((q[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=2)
            nearest = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
            out[start : start + chunk] = self.y_[nearest].mean(axis=1)
        return out

    def get_state(self):
        return {"k": self.k}, {"X": self.X_, "y": self.y_}

    @classmethod
    def from_state(cls, config, arrays):
        model = cls(**config)
        model.X_, model.y_ = arrays["X"].copy(), arrays["y"].copy()
        return model
