import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from codeqnn.core import (
    Bounds,
    Objective,
    Population,
    best_worst_indices,
    clamp,
    evaluate,
    make_rng,
    open_uniform,
    sphere,
    start_population,
    uniform_init,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_bounds_reject_degenerate_interval():
    with pytest.raises(ValueError, match="invalid bounds"):
        Bounds(1.0, 1.0)
    with pytest.raises(ValueError):
        Bounds(2.0, -2.0)


def test_uniform_init_containment_and_shape():
    pop = uniform_init(Bounds(-1, 1), 4, 2, make_rng(7))
    assert pop.members.shape == (4, 2)
    assert np.all((pop.members >= -1) & (pop.members <= 1))
    assert pop.fitness is None and pop.evaluations_used == 0


def test_uniform_init_is_deterministic():
    a = uniform_init(Bounds(-5, 5), 20, 7, make_rng(123))
    b = uniform_init(Bounds(-5, 5), 20, 7, make_rng(123))
    assert np.array_equal(a.members, b.members)


def test_uniform_init_rejects_small_population():
    with pytest.raises(ValueError, match="invalid size"):
        uniform_init(Bounds(0, 1), 3, 2, make_rng(0))


@given(st.integers(0, 2**63), st.integers(4, 30), st.integers(1, 12), finite, st.floats(1e-6, 1e6))
@settings(max_examples=50)
def test_uniform_init_containment_property(seed, s, dim, lb, width):
    b = Bounds(lb, lb + width)
    pop = uniform_init(b, s, dim, make_rng(seed))
    assert np.all(pop.members >= b.lb) and np.all(pop.members <= b.ub)


def test_evaluate_sum_of_squares():
    f = Objective(sphere, 2, Bounds(-5, 5))
    pop = Population(np.array([[0.0, 0.0], [1.0, 2.0], [3.0, 0.0], [0.0, -1.0]]))
    evaluate(pop, f)
    assert pop.fitness.tolist() == [0.0, 5.0, 9.0, 1.0]
    assert pop.evaluations_used == 4


def test_evaluate_counts_every_fresh_evaluation():
    f = Objective(sphere, 3, Bounds(-5, 5))
    pop = uniform_init(f.bounds, 20, 3, make_rng(1))
    evaluate(pop, f)
    assert pop.evaluations_used == 20
    for x, fx in zip(pop.members, pop.fitness):
        assert f(x) == fx


def test_evaluate_dimension_mismatch():
    f = Objective(sphere, 3, Bounds(-5, 5))
    pop = uniform_init(f.bounds, 4, 2, make_rng(1))
    with pytest.raises(ValueError, match="dimension mismatch"):
        evaluate(pop, f)


def test_nan_fitness_is_worst():
    f = Objective(lambda x: float("nan"), 1, Bounds(0, 1))
    assert f(np.array([0.5])) == math.inf


@pytest.mark.parametrize(
    "fitness, expected",
    [([5, 5, 5, 5], (0, 0)), ([4, 2, 2, 9], (1, 3)), ([1, 0, 0, 1], (1, 0))],
)
def test_best_worst_indices(fitness, expected):
    pop = Population(np.zeros((4, 1)), fitness)
    assert best_worst_indices(pop) == expected


def test_best_worst_three_values():
    # fitness [3, 1, 2] padded with a middle value so that s >= 4
    pop = Population(np.zeros((4, 1)), [3, 1, 2, 2.5])
    assert best_worst_indices(pop) == (1, 0)


def test_best_worst_requires_fitness():
    with pytest.raises(ValueError, match="unevaluated"):
        best_worst_indices(Population(np.zeros((4, 1))))


def test_clamp_examples():
    b = Bounds(-5, 5)
    assert clamp(np.array([-7.0, 0.0, 12.0]), b).tolist() == [-5, 0, 5]
    v = np.array([1.5, -2.0])
    assert np.array_equal(clamp(v, b), v)
    assert clamp(np.array([5.0, -5.0]), b).tolist() == [5.0, -5.0]


@given(arrays(np.float64, st.integers(1, 20), elements=st.floats(-1e9, 1e9)))
def test_clamp_idempotent(v):
    b = Bounds(-3, 4)
    once = clamp(v, b)
    assert np.array_equal(clamp(once, b), once)
    assert np.all((once >= -3) & (once <= 4))


def test_open_uniform_skips_zero():
    class Zeros:
        def __init__(self):
            self.draws = [0.0, 0.0, 0.25]

        def random(self):
            return self.draws.pop(0)

    assert open_uniform(Zeros()) == 0.25


def test_same_seed_same_stream():
    assert np.array_equal(make_rng(99).random(50), make_rng(99).random(50))


def test_start_population_copies_initial():
    f = Objective(sphere, 2, Bounds(-1, 1))
    init = uniform_init(f.bounds, 4, 2, make_rng(0))
    pop = start_population(f, 4, 10, make_rng(1), init)
    assert pop is not init and init.fitness is None
    assert pop.evaluations_used == 4
    with pytest.raises(ValueError, match="invalid budget"):
        start_population(f, 4, 3, make_rng(1))
