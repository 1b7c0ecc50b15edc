"""Particle swarm maximization over a bounded box."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NoFeasiblePointError


@dataclass(frozen=True)
class SearchSpace:
    lower: tuple
    upper: tuple
    integer_dims: frozenset = frozenset()
    names: tuple = ()

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) == 0 or len(lower) != len(upper):
            raise ValueError("lower and upper must be non-empty and of equal length")
        if any(lo > hi for lo, hi in zip(lower, upper)):
            raise ValueError("lower bound exceeds upper bound")
        dims = frozenset(int(d) for d in self.integer_dims)
        if any(not 0 <= d < len(lower) for d in dims):
            raise ValueError("integer dimension index out of range")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "integer_dims", dims)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def dim(self):
        return len(self.lower)

    def snap(self, x):
        """Round integer dimensions, keeping the result inside the bounds."""
        x = np.array(x, dtype=np.float64)
        for d in self.integer_dims:
            lo, hi = math.ceil(self.lower[d]), math.floor(self.upper[d])
            x[d] = float(min(max(round(x[d]), lo), hi)) if lo <= hi else x[d]
        return x


@dataclass(frozen=True)
class SwarmConfig:
    population: int = 10
    iterations: int = 15
    inertia: float = 0.8
    cognitive: float = 1.5
    social: float = 1.5
    vmax_fraction: float = 0.5

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 < self.vmax_fraction <= 1:
            raise ValueError("vmax_fraction must lie in (0, 1]")


@dataclass
class PsoResult:
    best_position: np.ndarray
    best_fitness: float
    best_history: list
    evaluations: int
    log: list = field(default_factory=list, repr=False)

    def write_log(self, path, names=None):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        dim = len(self.best_position)
        names = list(names) if names else [f"x{d}" for d in range(dim)]
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "particle", *names, "fitness"])
            for it, p, pos, fit in self.log:
                w.writerow([it, p, *(repr(float(v)) for v in pos), repr(float(fit))])
        return path


def bilstm_search_space():
    """L2 coefficient, initial learning rate, hidden units."""
    return SearchSpace(
        lower=(1e-8, 1e-4, 2),
        upper=(1e-1, 1e-1, 100),
        integer_dims={2},
        names=("l2_coefficient", "initial_lr", "hidden_units"),
    )


def gbt_search_space():
    """Learning rate, maximum depth, leaf L2 regularization."""
    return SearchSpace(
        lower=(0.01, 2, 1e-3),
        upper=(0.5, 8, 10),
        integer_dims={1},
        names=("learning_rate", "max_depth", "leaf_l2"),
    )


def evaluation_seed(seed, iteration, particle):
    digest = hashlib.sha256(f"{seed}:{iteration}:{particle}".encode()).digest()
    return int.from_bytes(digest[:4], "little")


def _safe_eval(fitness, position, seed):
    try:
        value = float(fitness(position, seed))
    except Exception:
        return -math.inf
    return value if math.isfinite(value) else -math.inf


def optimize(space, fitness, cfg=None, seed=0, executor=None):
    """Maximize ``fitness(position, eval_seed)`` over ``space``.

    ``eval_seed`` is derived from (seed, iteration, particle) so evaluations can
    run through ``executor.map`` without changing the result. Exceptions and
    non-finite values count as -inf.
    """
    cfg = cfg or SwarmConfig()
    rng = np.random.default_rng(seed)
    lower = np.array(space.lower)
    upper = np.array(space.upper)
    vmax = cfg.vmax_fraction * (upper - lower)
    P, D = cfg.population, space.dim

    x = lower + rng.random((P, D)) * (upper - lower)
    v = np.zeros((P, D))
    log = []

    def evaluate(iteration):
        points = [space.snap(x[p]) for p in range(P)]
        seeds = [evaluation_seed(seed, iteration, p) for p in range(P)]
        jobs = zip(points, seeds)
        if executor is not None:
            values = list(executor.map(lambda a: _safe_eval(fitness, *a), jobs))
        else:
            values = [_safe_eval(fitness, *a) for a in jobs]
        for p in range(P):
            log.append((iteration, p, points[p], values[p]))
        return np.array(values)

    fit = evaluate(0)
    pbest, pbest_fit = x.copy(), fit.copy()
    g = int(np.argmax(fit))  # first maximum = lowest index
    gbest, gbest_fit = x[g].copy(), fit[g]

    history = []
    for it in range(1, cfg.iterations + 1):
        r1 = rng.random((P, D))
        r2 = rng.random((P, D))
        v = (
            cfg.inertia * v
            + cfg.cognitive * r1 * (pbest - x)
            + cfg.social * r2 * (gbest - x)
        )
        v = np.clip(v, -vmax, vmax)
        x = np.clip(x + v, lower, upper)
        fit = evaluate(it)
        for p in range(P):
            if fit[p] > pbest_fit[p]:
                pbest[p], pbest_fit[p] = x[p], fit[p]
            if fit[p] > gbest_fit:
                gbest, gbest_fit = x[p].copy(), fit[p]
        history.append(float(gbest_fit))

    if not math.isfinite(gbest_fit):
        raise NoFeasiblePointError("every fitness evaluation failed")
    return PsoResult(
        best_position=space.snap(gbest),
        best_fitness=float(gbest_fit),
        best_history=history,
        evaluations=P * (cfg.iterations + 1),
        log=log,
    )
