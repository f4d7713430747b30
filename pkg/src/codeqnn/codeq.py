"""CODEQ: chaotic search + opposition-based learning + DE + quantum-style mutation.

One iteration costs ``s + 1`` objective evaluations:

1. every parent ``x_i`` proposes ``v_i = x_i + (x_i1 - x_i2) * ln(1/u)`` and is
   replaced in place if ``v_i`` is strictly better;
2. one extra vector ``w`` is built either by opposition of the worst member,
   ``LB + UB - r * x_worst``, or by a chaotic perturbation of the best member,
   ``x_best + |x_i1 - x_i2| * (2c - 1)``; it replaces the worst member if
   strictly better.

All candidates are clamped to the search box before evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from codeqnn.core import (
    Bounds,
    Objective,
    OptimizeResult,
    Population,
    best_worst_indices,
    clamp,
    make_rng,
    open_uniform,
    start_population,
)


@dataclass
class ChaoticState:
    """Generalized tent map ``c -> c/p`` on ``(0, p)``, ``(1-c)/(1-p)`` on ``[p, 1)``.

    ``rng`` is only consulted when the orbit degenerates (hits 0 or 1), in
    which case ``c`` is redrawn uniformly from ``(0, 1)``.
    """

    c: float
    p: float
    rng: np.random.Generator = field(default_factory=lambda: make_rng(0), repr=False)

    def __post_init__(self):
        if not (0.0 < self.c < 1.0 and 0.0 < self.p < 1.0):
            raise ValueError(f"chaotic state needs c, p in (0, 1), got c={self.c}, p={self.p}")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "ChaoticState":
        c0 = open_uniform(rng)
        p = open_uniform(rng)
        return cls(c0, p, rng)


def chaotic_step(state: ChaoticState) -> float:
    c, p = state.c, state.p
    if c < p:
        c = c / p
    else:
        c = (1.0 - c) / (1.0 - p)
    # p = 0.5 is exact doubling in binary and collapses onto 0 within ~53 steps
    while not 0.0 < c < 1.0:
        c = open_uniform(state.rng)
    state.c = c
    return c


def trial_vector(parent: np.ndarray, a: np.ndarray, b: np.ndarray, u: float) -> np.ndarray:
    """Quantum-inspired mutation with one scalar ``u`` shared by all dimensions."""
    if not 0.0 < u < 1.0:
        raise ValueError(f"invalid u: must lie strictly in (0, 1), got {u}")
    return parent + (a - b) * math.log(1.0 / u)


def opposition_vector(worst: np.ndarray, bounds: Bounds, r: float) -> np.ndarray:
    return bounds.lb + bounds.ub - r * worst


def chaotic_vector(best: np.ndarray, a: np.ndarray, b: np.ndarray, c: float) -> np.ndarray:
    return best + np.abs(a - b) * (2.0 * c - 1.0)


def distinct_pair(rng: np.random.Generator, s: int, exclude: int) -> tuple[int, int]:
    """Two distinct indices in ``range(s)``, both different from ``exclude``."""
    while True:
        i1 = int(rng.integers(s))
        if i1 != exclude:
            break
    while True:
        i2 = int(rng.integers(s))
        if i2 != exclude and i2 != i1:
            return i1, i2


def greedy_replace(pop: Population, index: int, candidate: np.ndarray, f: Objective) -> Population:
    if not 0 <= index < pop.size:
        raise IndexError(f"index {index} out of range for population of {pop.size}")
    value = f(candidate)
    pop.evaluations_used += 1
    if value < pop.fitness[index]:
        pop.members[index] = candidate
        pop.fitness[index] = value
    return pop


def opposition_quantum_vector(
    pop: Population, chaos: ChaoticState, bounds: Bounds, rng: np.random.Generator
) -> np.ndarray:
    """Build the per-iteration vector ``w`` (clamped).

    The chaotic variable is advanced on every call so that ``c`` tracks the
    iteration counter whichever branch is taken.
    """
    best, worst = best_worst_indices(pop)
    c = chaotic_step(chaos)
    if rng.random() <= 0.5:
        w = opposition_vector(pop.members[worst], bounds, rng.random())
    else:
        i1, i2 = distinct_pair(rng, pop.size, exclude=worst)
        w = chaotic_vector(pop.members[best], pop.members[i1], pop.members[i2], c)
    return clamp(w, bounds)


def replace_worst_if_better(pop: Population, candidate: np.ndarray, f: Objective) -> Population:
    _, worst = best_worst_indices(pop)
    return greedy_replace(pop, worst, candidate, f)


def codeq_optimize(
    f: Objective,
    s: int = 20,
    budget: int = 10_000,
    seed: int = 0,
    initial: Optional[Population] = None,
    rng: Optional[np.random.Generator] = None,
) -> OptimizeResult:
    """Minimize ``f`` with CODEQ until the evaluation budget is spent.

    Parameters
    ----------
    f : Objective
        Fitness function with its dimension and box bounds.
    s : int
        Population size (>= 4).
    budget : int
        Maximum number of objective evaluations, including the initial
        population. The run stops as soon as the next evaluation would exceed
        it, possibly part-way through an iteration.
    seed : int
        Seed for the run's random stream; ignored when ``rng`` is given.
    initial : Population, optional
        Starting population (copied, evaluated if needed). Lets several
        optimizers start from the same points.
    rng : numpy.random.Generator, optional
        Explicit random stream.
    """
    rng = make_rng(seed) if rng is None else rng
    bounds = f.bounds
    pop = start_population(f, s, budget, rng, initial)
    initial_best = float(pop.fitness.min())
    chaos = ChaoticState.random(rng)
    history = []

    while pop.evaluations_used < budget:
        for i in range(s):
            if pop.evaluations_used >= budget:
                break
            i1, i2 = distinct_pair(rng, s, exclude=i)
            u = open_uniform(rng)
            v = clamp(trial_vector(pop.members[i], pop.members[i1], pop.members[i2], u), bounds)
            greedy_replace(pop, i, v, f)
        if pop.evaluations_used < budget:
            w = opposition_quantum_vector(pop, chaos, bounds, rng)
            replace_worst_if_better(pop, w, f)
        history.append(float(pop.fitness.min()))

    best, _ = best_worst_indices(pop)
    return OptimizeResult(
        best=pop.members[best].copy(),
        best_fitness=float(pop.fitness[best]),
        history=np.array(history),
        initial_best_fitness=initial_best,
        evaluations=pop.evaluations_used,
        algorithm="codeq",
    )
