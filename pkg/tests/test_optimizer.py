import numpy as np
import pytest

from greycast import GwoConfig, OptimizationError, SplitSpec, split
from greycast.optimizer import (DEFAULT_BOUNDS, gwo_minimize, model_fitness,
                                optimize, trace_rows)
from greycast.series import load_fixture


def sphere_at(target):
    target = np.asarray(target)
    return lambda x: float(np.sum((np.asarray(x) - target) ** 2))


def test_synthetic_convex_oracle():
    cfg = GwoConfig(population=20, iterations=100, seed=3)
    res = gwo_minimize(sphere_at([1.0, 0.5, 2.0]), [0, 0, 0], [3, 1, 4], cfg)
    np.testing.assert_allclose(res.position, [1.0, 0.5, 2.0], atol=1e-2)


def test_seed_determinism():
    cfg = GwoConfig(population=12, iterations=40, seed=7)
    r1 = gwo_minimize(sphere_at([0.3, 0.7]), [0, 0], [1, 1], cfg)
    r2 = gwo_minimize(sphere_at([0.3, 0.7]), [0, 0], [1, 1], cfg)
    np.testing.assert_array_equal(r1.position, r2.position)
    assert r1.fitness == r2.fitness
    assert [p.best_fitness for p in r1.trace] == [p.best_fitness for p in r2.trace]


def test_monotone_trace_and_elitism():
    cfg = GwoConfig(population=10, iterations=60, seed=11)
    res = gwo_minimize(sphere_at([0.2, 0.9, 1.5]), [0, 0, 0], [2, 2, 2], cfg)
    best = [p.best_fitness for p in res.trace]
    assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))
    # reported best equals the minimum over every logged evaluation
    assert res.fitness == min(f for _, f in res.evaluations)


def test_bound_respect():
    cfg = GwoConfig(population=8, iterations=30, seed=5)
    res = gwo_minimize(sphere_at([5.0, -5.0]), [0, -1], [1, 0], cfg)
    for pos, _ in res.evaluations:
        assert 0 <= pos[0] <= 1
        assert -1 <= pos[1] <= 0


def test_minimal_run():
    cfg = GwoConfig(population=4, iterations=1, seed=1)
    res = gwo_minimize(sphere_at([0.5]), [0], [1], cfg)
    assert len(res.trace) == 2  # initial sample plus one update
    assert res.fitness == min(f for _, f in res.evaluations)


def test_single_step_never_worsens():
    cfg = GwoConfig(population=4, iterations=1, seed=7)
    res = gwo_minimize(sphere_at([0.4, 0.6, 0.1]), [0, 0, 0], [1, 1, 1], cfg)
    assert res.trace[-1].best_fitness <= res.trace[0].best_fitness


def test_control_schedule():
    cfg = GwoConfig(population=6, iterations=25, seed=2)
    res = gwo_minimize(sphere_at([0.5, 0.5]), [0, 0], [1, 1], cfg)
    assert len(res.trace) == cfg.iterations + 1
    for point in res.trace[1:]:
        expected = 2.0 * (1.0 - point.iteration / cfg.iterations)
        assert point.control == pytest.approx(expected, abs=1e-12)
    assert res.trace[-1].control == 0.0


def test_config_validation():
    with pytest.raises(Exception):
        GwoConfig(population=3)
    with pytest.raises(Exception):
        GwoConfig(iterations=0)
    with pytest.raises(Exception):
        GwoConfig(bounds={"r": (2.0, 1.0)})


# --- model fitness -----------------------------------------------------------

@pytest.fixture(scope="module")
def shanghai_train():
    train, _ = split(load_fixture("shanghai-diesel"), SplitSpec(16, 2))
    return train


@pytest.fixture(scope="module")
def china_train():
    train, _ = split(load_fixture("china-co2"), SplitSpec(17, 2))
    return train


def test_fitness_shanghai_paper_optimum(shanghai_train):
    f = model_fitness((0.6660, 0.0958, 6.0956), shanghai_train, "ccfngbm")
    assert f == pytest.approx(3.66, abs=0.01)


def test_fitness_gamma_one_penalized(shanghai_train):
    assert model_fitness((1.0, 1.0, 1.0), shanghai_train, "ccfngbm") == 1e9


def test_fitness_r_below_alpha_penalized(shanghai_train):
    assert model_fitness((0.2, 0.9, 2.0), shanghai_train, "ccfngbm") == 1e9


def test_fitness_china_gm_point(china_train):
    f = model_fitness((1.0, 1.0, 0.0), china_train, "ccfngbm")
    assert f == pytest.approx(9.31, abs=0.02)


def test_fitness_fixed_subset(shanghai_train):
    full = model_fitness((0.6660, 0.0958, 6.0956), shanghai_train, "ccfngbm")
    partial = model_fitness((0.0958, 6.0956), shanghai_train, "ccfngbm",
                            fixed={"r": 0.6660})
    assert partial == full


def test_optimize_shanghai_reaches_paper(shanghai_train):
    cfg = GwoConfig(population=30, iterations=200, seed=42)
    out = optimize(shanghai_train, "ccfngbm", cfg)
    assert out.fitness <= 3.66 + 0.5
    assert set(out.params) == {"r", "alpha", "gamma"}
    for name, value in out.params.items():
        lo, hi = DEFAULT_BOUNDS[name]
        assert lo <= value <= hi


def test_optimize_determinism(shanghai_train):
    cfg = GwoConfig(population=10, iterations=30, seed=42)
    o1 = optimize(shanghai_train, "ccfngbm", cfg)
    o2 = optimize(shanghai_train, "ccfngbm", cfg)
    assert o1.params == o2.params
    assert o1.fitness == o2.fitness


def test_optimize_all_infeasible(shanghai_train):
    # a gamma interval hugging 1 leaves no feasible candidate
    cfg = GwoConfig(population=4, iterations=2, seed=1,
                    bounds={**DEFAULT_BOUNDS, "gamma": (1.0 - 1e-8, 1.0 + 1e-8)})
    with pytest.raises(OptimizationError) as exc:
        optimize(shanghai_train, "ccfngbm", cfg)
    assert exc.value.trace


def test_optimize_rejects_fixed_only_kind(shanghai_train):
    with pytest.raises(Exception):
        optimize(shanghai_train, "gm")


def test_trace_rows_fill_pinned_values(shanghai_train):
    cfg = GwoConfig(population=5, iterations=3, seed=0)
    out = optimize(shanghai_train, "ngbm", cfg)
    rows = trace_rows("ngbm", out.trace)
    assert rows[0]["iteration"] == 0
    assert rows[-1]["best_fitness"] == out.fitness
    assert rows[0]["r"] == ""  # not searched for ngbm
    assert rows[0]["gamma"] != ""
