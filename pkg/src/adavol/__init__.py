"""Adaptive-volatility Langevin sampling for global optimisation.

Modules
-------
objective
    Objective functions with batched values and gradients.
diffusion
    The activation, the state-dependent diffusion coefficient and the drift.
samplers
    Ensemble Euler-Maruyama samplers (AdaVol and comparators).
diagnostics
    Numerical checks of stationarity, contraction and concentration.
harness
    Config parsing, experiment runner and command-line interface.
"""

__version__ = "0.1.0"

from .diffusion import ActivationParams, activation, scalar_coefficient
from .errors import ConfigError, DivergenceError, DomainError, UnsupportedObjectiveError
from .objective import (
    CountingObjective,
    DoubleWell,
    FunctionObjective,
    ObjectiveFunction,
    Quadratic,
    ShiftedRastrigin,
)
from .samplers import METHODS, RunResult, SamplerConfig, TrajectoryRecord, run

__all__ = [
    "__version__",
    "ActivationParams",
    "activation",
    "scalar_coefficient",
    "ConfigError",
    "DivergenceError",
    "DomainError",
    "UnsupportedObjectiveError",
    "CountingObjective",
    "DoubleWell",
    "FunctionObjective",
    "ObjectiveFunction",
    "Quadratic",
    "ShiftedRastrigin",
    "METHODS",
    "RunResult",
    "SamplerConfig",
    "TrajectoryRecord",
    "run",
]
