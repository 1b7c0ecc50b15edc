import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ragq.errors import NoFeasiblePointError
from ragq.pso import SearchSpace, SwarmConfig, bilstm_search_space, gbt_search_space, optimize


def sphere(x, seed):
    return -float(np.sum(np.asarray(x) ** 2))


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_sphere_converges(seed):
    space = SearchSpace((-5, -5, -5), (5, 5, 5))
    res = optimize(space, sphere, SwarmConfig(population=20, iterations=60), seed=seed)
    assert res.best_fitness > -0.01
    assert res.best_fitness == pytest.approx(sphere(res.best_position, 0))


def test_degenerate_space():
    res = optimize(SearchSpace((3.7,), (3.7,)), lambda x, s: np.sin(x[0]), SwarmConfig(iterations=1), seed=0)
    assert res.best_position.tolist() == [3.7]


def test_default_configuration_history():
    res = optimize(bilstm_search_space(), lambda x, s: -abs(x[2] - 40), SwarmConfig(), seed=0)
    assert SwarmConfig().population == 10 and SwarmConfig().iterations == 15
    assert len(res.best_history) == 15
    assert np.all(np.diff(res.best_history) >= 0)
    assert res.evaluations == 10 * 16


def test_default_coefficients():
    cfg = SwarmConfig()
    assert (cfg.inertia, cfg.cognitive, cfg.social, cfg.vmax_fraction) == (0.8, 1.5, 1.5, 0.5)


def test_bilstm_space():
    sp = bilstm_search_space()
    assert sp.lower == (1e-8, 1e-4, 2)
    assert sp.upper == (1e-1, 1e-1, 100)
    assert sp.integer_dims == {2}
    assert sp.names == ("l2_coefficient", "initial_lr", "hidden_units")


def test_gbt_space():
    sp = gbt_search_space()
    assert sp.lower == (0.01, 2, 1e-3)
    assert sp.upper == (0.5, 8, 10)
    assert sp.integer_dims == {1}


def test_integer_dims_rounded_at_evaluation():
    seen = []

    def fit(x, s):
        seen.append(x[2])
        return -abs(x[2] - 17.3)

    res = optimize(bilstm_search_space(), fit, SwarmConfig(population=6, iterations=5), seed=2)
    assert all(v == round(v) for v in seen)
    assert res.best_position[2] == round(res.best_position[2])


def test_all_failed():
    def boom(x, s):
        raise RuntimeError("diverged")

    with pytest.raises(NoFeasiblePointError):
        optimize(SearchSpace((0,), (1,)), boom, SwarmConfig(population=3, iterations=2))
    with pytest.raises(NoFeasiblePointError):
        optimize(SearchSpace((0,), (1,)), lambda x, s: math.nan, SwarmConfig(population=3, iterations=2))


def test_some_failures_tolerated():
    def flaky(x, s):
        if x[0] > 0.5:
            raise RuntimeError("diverged")
        return x[0]

    res = optimize(SearchSpace((0,), (1,)), flaky, SwarmConfig(population=8, iterations=10), seed=0)
    assert res.best_position[0] <= 0.5
    assert any(f == -math.inf for *_, f in res.log)


@pytest.mark.parametrize(
    "kwargs", [{"population": 1}, {"iterations": 0}, {"vmax_fraction": 0}, {"vmax_fraction": 1.5}]
)
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        SwarmConfig(**kwargs)


def test_invalid_space():
    with pytest.raises(ValueError):
        SearchSpace((), ())
    with pytest.raises(ValueError):
        SearchSpace((1, 2), (0, 3))
    with pytest.raises(ValueError):
        SearchSpace((0,), (1,), integer_dims={3})


def test_run_log(tmp_path):
    res = optimize(SearchSpace((0, 0), (1, 1)), sphere, SwarmConfig(population=3, iterations=2), seed=0)
    path = res.write_log(tmp_path / "log.csv", ["a", "b"])
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,particle,a,b,fitness"
    assert len(lines) == 1 + res.evaluations


def test_evaluation_seeds_distinct():
    seeds = []
    optimize(SearchSpace((0,), (1,)), lambda x, s: seeds.append(s) or 0.0, SwarmConfig(population=4, iterations=3))
    assert len(set(seeds)) == len(seeds)


bounds = st.lists(
    st.tuples(st.floats(-100, 100), st.floats(0, 50)), min_size=1, max_size=4
).map(lambda pairs: ([lo for lo, _ in pairs], [lo + w for lo, w in pairs]))


@given(
    bounds,
    st.integers(2, 8),
    st.integers(1, 6),
    st.integers(0, 2**31 - 1),
    st.floats(0.05, 1.0),
)
def test_positions_in_bounds_and_history_monotone(box, population, iterations, seed, vmax):
    lower, upper = box
    space = SearchSpace(lower, upper, integer_dims={0})
    recorded = []

    def fit(x, s):
        recorded.append(np.array(x))
        return float(np.cos(np.sum(x)))

    cfg = SwarmConfig(population=population, iterations=iterations, vmax_fraction=vmax)
    res = optimize(space, fit, cfg, seed=seed)
    lo, hi = np.array(space.lower), np.array(space.upper)
    for x in recorded:
        assert np.all(x >= lo) and np.all(x <= hi)
    assert np.all(res.best_position >= lo) and np.all(res.best_position <= hi)
    assert np.all(np.diff(res.best_history) >= 0)
    assert len(res.best_history) == iterations


@given(st.integers(0, 2**31 - 1))
def test_concurrent_evaluation_deterministic(seed):
    space = SearchSpace((-3, -3), (3, 3))

    def fit(x, s):
        # plateaus make ties frequent, exercising the tie-break
        return -float(np.floor(np.abs(x).sum()))

    cfg = SwarmConfig(population=6, iterations=5)
    serial = optimize(space, fit, cfg, seed=seed)
    with ThreadPoolExecutor(4) as pool:
        parallel = optimize(space, fit, cfg, seed=seed, executor=pool)
    assert np.array_equal(serial.best_position, parallel.best_position)
    assert serial.best_history == parallel.best_history
    assert serial.best_fitness == parallel.best_fitness


@given(st.integers(0, 2**31 - 1))
def test_argmax_invariant_under_monotone_transform(seed):
    space = SearchSpace((0, 0), (10, 10), integer_dims={0, 1})

    def grid(x, s):
        return -float((x[0] - 6) ** 2 + (x[1] - 3) ** 2)

    def squashed(x, s):
        return math.atan(grid(x, s) / 7.0) * 3 + 11

    cfg = SwarmConfig(population=5, iterations=4)
    a = optimize(space, grid, cfg, seed=seed)
    b = optimize(space, squashed, cfg, seed=seed)
    assert np.array_equal(a.best_position, b.best_position)
