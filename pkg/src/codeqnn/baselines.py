"""Comparison optimizers: gbest PSO and self-adaptive DE (jDE, DE/rand/1/bin).

Both follow the same contract as :func:`codeqnn.codeq.codeq_optimize`: budget
counted in objective evaluations, optional shared initial population, clamped
candidates, strict-improvement replacement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from codeqnn.core import (
    MIN_POPULATION,
    Bounds,
    Objective,
    OptimizeResult,
    Population,
    clamp,
    make_rng,
    start_population,
)

# Clerc-Kennedy constriction expressed as inertia weight form
PSO_INERTIA = 0.7298
PSO_COGNITIVE = 1.49618
PSO_SOCIAL = 1.49618

# Brest et al. (2006) defaults
SDE_TAU1 = 0.1
SDE_TAU2 = 0.1
SDE_F_LOWER = 0.1
SDE_F_UPPER = 0.9
SDE_F_INIT = 0.5
SDE_CR_INIT = 0.9


# --------------------------------------------------------------------------
# PSO
# --------------------------------------------------------------------------


@dataclass
class PsoState:
    positions: np.ndarray
    velocities: np.ndarray
    pbest: np.ndarray
    pbest_fitness: np.ndarray
    gbest: np.ndarray
    gbest_fitness: float
    inertia: float = PSO_INERTIA
    cognitive: float = PSO_COGNITIVE
    social: float = PSO_SOCIAL
    vmax: float = 1.0
    evaluations_used: int = 0

    @classmethod
    def from_population(cls, pop: Population, bounds: Bounds, **coefficients) -> "PsoState":
        """Particles start at the population members with zero velocity."""
        k = int(np.argmin(pop.fitness))
        coefficients.setdefault("vmax", bounds.width / 2.0)
        return cls(
            positions=pop.members.copy(),
            velocities=np.zeros_like(pop.members),
            pbest=pop.members.copy(),
            pbest_fitness=pop.fitness.copy(),
            gbest=pop.members[k].copy(),
            gbest_fitness=float(pop.fitness[k]),
            evaluations_used=pop.evaluations_used,
            **coefficients,
        )


def pso_velocity(velocity, position, pbest, gbest, r1, r2, inertia, cognitive, social, vmax):
    v = inertia * velocity + cognitive * r1 * (pbest - position) + social * r2 * (gbest - position)
    return np.clip(v, -vmax, vmax)


def pso_step(
    state: PsoState,
    f: Objective,
    rng: np.random.Generator,
    max_evaluations: Optional[int] = None,
) -> PsoState:
    """Move every particle once, then refresh personal and global bests.

    ``max_evaluations`` caps this step's evaluations; particles beyond the cap
    move but are not scored (the run is ending).
    """
    s, dim = state.positions.shape
    r1 = rng.random((s, dim))
    r2 = rng.random((s, dim))
    state.velocities = pso_velocity(
        state.velocities, state.positions, state.pbest, state.gbest, r1, r2,
        state.inertia, state.cognitive, state.social, state.vmax,
    )
    state.positions = clamp(state.positions + state.velocities, f.bounds)

    n_eval = s if max_evaluations is None else min(s, max_evaluations)
    for k in range(n_eval):
        value = f(state.positions[k])
        state.evaluations_used += 1
        if value < state.pbest_fitness[k]:
            state.pbest[k] = state.positions[k]
            state.pbest_fitness[k] = value

    k = int(np.argmin(state.pbest_fitness))
    if state.pbest_fitness[k] < state.gbest_fitness:
        state.gbest = state.pbest[k].copy()
        state.gbest_fitness = float(state.pbest_fitness[k])
    return state


def pso_optimize(
    f: Objective,
    s: int = 20,
    budget: int = 10_000,
    seed: int = 0,
    initial: Optional[Population] = None,
    rng: Optional[np.random.Generator] = None,
) -> OptimizeResult:
    """gbest inertia-weight PSO, w=0.7298, c1=c2=1.49618, vmax=(ub-lb)/2."""
    rng = make_rng(seed) if rng is None else rng
    pop = start_population(f, s, budget, rng, initial)
    state = PsoState.from_population(pop, f.bounds)
    initial_best = state.gbest_fitness
    history = []
    while state.evaluations_used < budget:
        pso_step(state, f, rng, max_evaluations=budget - state.evaluations_used)
        history.append(state.gbest_fitness)
    return OptimizeResult(
        best=state.gbest.copy(),
        best_fitness=state.gbest_fitness,
        history=np.array(history),
        initial_best_fitness=initial_best,
        evaluations=state.evaluations_used,
        algorithm="pso",
    )


# --------------------------------------------------------------------------
# Self-adaptive DE
# --------------------------------------------------------------------------


@dataclass
class SdeState:
    """Population plus each individual's own mutation scale and crossover rate."""

    pop: Population
    F: np.ndarray
    CR: np.ndarray

    @classmethod
    def from_population(cls, pop: Population) -> "SdeState":
        return cls(pop, np.full(pop.size, SDE_F_INIT), np.full(pop.size, SDE_CR_INIT))


def sde_adapt(F: float, CR: float, rng, tau1: float = SDE_TAU1, tau2: float = SDE_TAU2) -> tuple[float, float]:
    """Regenerate ``F`` with probability ``tau1`` and ``CR`` with probability ``tau2``."""
    if rng.random() < tau1:
        F = SDE_F_LOWER + SDE_F_UPPER * rng.random()
    if rng.random() < tau2:
        CR = rng.random()
    return F, CR


def de_rand1(base: np.ndarray, a: np.ndarray, b: np.ndarray, F: float) -> np.ndarray:
    return base + F * (a - b)


def binomial_crossover(target: np.ndarray, mutant: np.ndarray, CR: float, rng) -> np.ndarray:
    dim = target.shape[0]
    mask = rng.random(dim) < CR
    mask[rng.integers(dim)] = True
    return np.where(mask, mutant, target)


def distinct_triple(rng: np.random.Generator, s: int, exclude: int) -> tuple[int, int, int]:
    chosen: list[int] = []
    while len(chosen) < 3:
        r = int(rng.integers(s))
        if r != exclude and r not in chosen:
            chosen.append(r)
    return chosen[0], chosen[1], chosen[2]


def sde_step(
    state: SdeState,
    f: Objective,
    bounds: Bounds,
    rng: np.random.Generator,
    max_evaluations: Optional[int] = None,
) -> SdeState:
    """One jDE generation. Donors come from the generation at entry; winners
    replace their targets and keep the adapted ``(F, CR)``."""
    pop = state.pop
    s = pop.size
    if s < MIN_POPULATION:
        raise ValueError(f"population too small: DE/rand/1 needs s >= {MIN_POPULATION}")
    parents = pop.members.copy()
    n_eval = s if max_evaluations is None else min(s, max_evaluations)
    for i in range(n_eval):
        F, CR = sde_adapt(state.F[i], state.CR[i], rng)
        r1, r2, r3 = distinct_triple(rng, s, exclude=i)
        mutant = de_rand1(parents[r1], parents[r2], parents[r3], F)
        trial = clamp(binomial_crossover(parents[i], mutant, CR, rng), bounds)
        value = f(trial)
        pop.evaluations_used += 1
        if value < pop.fitness[i]:
            pop.members[i] = trial
            pop.fitness[i] = value
            state.F[i] = F
            state.CR[i] = CR
    return state


def sde_optimize(
    f: Objective,
    s: int = 20,
    budget: int = 10_000,
    seed: int = 0,
    initial: Optional[Population] = None,
    rng: Optional[np.random.Generator] = None,
) -> OptimizeResult:
    rng = make_rng(seed) if rng is None else rng
    pop = start_population(f, s, budget, rng, initial)
    state = SdeState.from_population(pop)
    initial_best = float(pop.fitness.min())
    history = []
    while pop.evaluations_used < budget:
        sde_step(state, f, f.bounds, rng, max_evaluations=budget - pop.evaluations_used)
        history.append(float(pop.fitness.min()))
    k = int(np.argmin(pop.fitness))
    return OptimizeResult(
        best=pop.members[k].copy(),
        best_fitness=float(pop.fitness[k]),
        history=np.array(history),
        initial_best_fitness=initial_best,
        evaluations=pop.evaluations_used,
        algorithm="sde",
        extra={"F": state.F.copy(), "CR": state.CR.copy()},
    )

