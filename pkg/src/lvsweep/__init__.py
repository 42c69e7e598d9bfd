"""Two-locus selective sweeps in a logistic birth-death population.

Exact stochastic simulation of a four-type competition model with
recombination, its deterministic Lotka-Volterra limits, closed-form
predictors for the final neutral proportion in the three sweep regimes,
forward-tagged genealogy statistics, and linear birth-death analytics.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND, available_backends
from .errors import (
    InsufficientSampleError,
    NumericalError,
    ParameterError,
    RegimeError,
    ValidationError,
)
from .model import (
    DerivedEcology,
    EcologyParams,
    PopState,
    ScalingParams,
    birth_rates,
    death_rates,
    derived_ecology,
    linkage_disequilibrium,
)
from .predict import SweepPrediction, predict_hard, predict_soft, rho_K
from .ssa import (
    FixationEstimate,
    SimConfig,
    SweepOutcome,
    fixation_frequency,
    hard_initial_state,
    run_sweep,
    soft_initial_state,
)

__all__ = [
    "BACKEND",
    "available_backends",
    "EcologyParams",
    "ScalingParams",
    "PopState",
    "DerivedEcology",
    "derived_ecology",
    "birth_rates",
    "death_rates",
    "linkage_disequilibrium",
    "SimConfig",
    "SweepOutcome",
    "run_sweep",
    "fixation_frequency",
    "FixationEstimate",
    "hard_initial_state",
    "soft_initial_state",
    "SweepPrediction",
    "predict_soft",
    "predict_hard",
    "rho_K",
    "ParameterError",
    "RegimeError",
    "ValidationError",
    "NumericalError",
    "InsufficientSampleError",
]
