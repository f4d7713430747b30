"""Shared optimization substrate: bounds, populations, randomness, objectives.

Every optimizer in this package minimizes an :class:`Objective` over a box
``[lb, ub]^D`` and accounts for its budget in objective evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

MIN_POPULATION = 4


@dataclass(frozen=True)
class Bounds:
    """Scalar box bounds applied uniformly to every dimension."""

    lb: float
    ub: float

    def __post_init__(self):
        if not (math.isfinite(self.lb) and math.isfinite(self.ub)):
            raise ValueError(f"bounds must be finite, got ({self.lb}, {self.ub})")
        if not self.lb < self.ub:
            raise ValueError(f"invalid bounds: lb={self.lb} must be < ub={self.ub}")

    @property
    def width(self) -> float:
        return self.ub - self.lb


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream; identical seeds give identical draws on every platform."""
    return np.random.Generator(np.random.PCG64(seed))


def open_uniform(rng: np.random.Generator) -> float:
    """One draw strictly inside (0, 1)."""
    while True:
        u = rng.random()
        if u > 0.0:
            return u


class Objective:
    """A pure fitness function over ``R^dim`` with its search box.

    Non-finite values returned by ``func`` are mapped to ``+inf`` so greedy
    selection never accepts them.
    """

    def __init__(self, func: Callable[[np.ndarray], float], dim: int, bounds: Bounds, name: str = ""):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self.func = func
        self.dim = int(dim)
        self.bounds = bounds
        self.name = name or getattr(func, "__name__", "objective")

    def __call__(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"dimension mismatch: expected ({self.dim},), got {x.shape}")
        value = float(self.func(x))
        if math.isnan(value):
            return math.inf
        return value

    def __repr__(self):
        return f"Objective({self.name!r}, dim={self.dim}, bounds=({self.bounds.lb}, {self.bounds.ub}))"


@dataclass
class Population:
    """``s`` candidate vectors (rows of ``members``) and their cached fitness.

    ``fitness`` is ``None`` until :func:`evaluate` fills it.
    """

    members: np.ndarray
    fitness: Optional[np.ndarray] = None
    evaluations_used: int = 0

    def __post_init__(self):
        self.members = np.array(self.members, dtype=float)
        if self.members.ndim != 2:
            raise ValueError("members must be a 2-D array (s, D)")
        if self.size < MIN_POPULATION:
            raise ValueError(f"invalid size: population needs s >= {MIN_POPULATION}, got {self.size}")
        if self.fitness is not None:
            self.fitness = np.array(self.fitness, dtype=float)
            if self.fitness.shape != (self.size,):
                raise ValueError("fitness must have one entry per member")

    @property
    def size(self) -> int:
        return self.members.shape[0]

    @property
    def dim(self) -> int:
        return self.members.shape[1]

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None

    def copy(self) -> "Population":
        return Population(
            self.members.copy(),
            None if self.fitness is None else self.fitness.copy(),
            self.evaluations_used,
        )


@dataclass
class OptimizeResult:
    """Outcome of one optimizer run.

    ``history[k]`` is the best fitness after iteration ``k``; the initial
    population's best is kept separately in ``initial_best_fitness``.
    """

    best: np.ndarray
    best_fitness: float
    history: np.ndarray
    initial_best_fitness: float
    evaluations: int
    algorithm: str = ""
    extra: dict = field(default_factory=dict)

    def __iter__(self):
        # allows ``best, best_fitness, history = result``
        return iter((self.best, self.best_fitness, self.history))


def uniform_init(bounds: Bounds, s: int, dim: int, rng: np.random.Generator) -> Population:
    if s < MIN_POPULATION:
        raise ValueError(f"invalid size: population needs s >= {MIN_POPULATION}, got {s}")
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    members = bounds.lb + (bounds.ub - bounds.lb) * rng.random((s, dim))
    # lb + w*u can round up to ub but never beyond; the clip is a guard only
    return Population(np.clip(members, bounds.lb, bounds.ub))


def evaluate(pop: Population, f: Objective) -> Population:
    """Fill the fitness cache with fresh evaluations of every member."""
    if pop.dim != f.dim:
        raise ValueError(f"dimension mismatch: population has D={pop.dim}, objective expects {f.dim}")
    pop.fitness = np.array([f(x) for x in pop.members], dtype=float)
    pop.evaluations_used += pop.size
    return pop


def best_worst_indices(pop: Population) -> tuple[int, int]:
    """Indices of the fittest and least fit members; ties go to the lowest index."""
    if pop.fitness is None:
        raise ValueError("unevaluated population: fitness cache is empty")
    # argmin/argmax return the first occurrence
    return int(np.argmin(pop.fitness)), int(np.argmax(pop.fitness))


def clamp(v: np.ndarray, bounds: Bounds) -> np.ndarray:
    return np.minimum(bounds.ub, np.maximum(bounds.lb, v))


def start_population(
    f: Objective,
    s: int,
    budget: int,
    rng: np.random.Generator,
    initial: Optional[Population] = None,
) -> Population:
    """Step-1 population for a run: a private copy of ``initial`` or a fresh
    uniform sample, evaluated if its cache is empty."""
    if budget < s:
        raise ValueError(f"invalid budget: {budget} cannot afford the initial {s} evaluations")
    if initial is None:
        pop = uniform_init(f.bounds, s, f.dim, rng)
    else:
        if initial.size != s:
            raise ValueError(f"initial population has {initial.size} members, expected s={s}")
        pop = initial.copy()
    if not pop.evaluated:
        evaluate(pop, f)
    if pop.evaluations_used > budget:
        raise ValueError("invalid budget: initial population already exceeds it")
    return pop


def sphere(x: np.ndarray) -> float:
    return float(np.dot(x, x))


def rosenbrock(x: np.ndarray) -> float:
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))
