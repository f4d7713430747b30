"""CODEQ, PSO and self-adaptive DE for training small feed-forward networks."""

from codeqnn.baselines import pso_optimize, sde_optimize
from codeqnn.codeq import codeq_optimize
from codeqnn.core import Bounds, Objective, OptimizeResult, Population

__all__ = [
    "Bounds",
    "Objective",
    "OptimizeResult",
    "Population",
    "codeq_optimize",
    "pso_optimize",
    "sde_optimize",
]

__version__ = "0.1.0"
