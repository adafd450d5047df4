"""Time stepping for subdiffusion with weakly singular source terms.

BDF2 convolution quadrature for the Caputo derivative, with the source
regularized by k-fold time integration (the IDk-BDF2 family).
"""

from __future__ import annotations

from .cq import bdf2_power_weights, cq_weights, discrete_convolve
from .harness import (
    ConfigError,
    ConvergenceTable,
    ExperimentConfig,
    ExperimentResult,
    empirical_rate,
    run_experiment,
    run_oracle_check,
    self_difference,
)
from .mittag_leffler import MLDomainError, ml
from .oracle import SeparableProblem, exact_solution, scalar_reference
from .quadrature import JacobiRule, integrate, jacobi_rule
from .solver import IncompatibleScheme, Scheme, SolveResult, TimeGrid, solve
from .source import Convolution, Monomial, Product, SourceSpec, eval_regularized, eval_source
from .space import ChebyshevOperator, FiniteDifferenceOperator, ScalarOperator, eigenpairs, make_operator

__version__ = "0.1.0"

__all__ = [
    "ChebyshevOperator",
    "ConfigError",
    "ConvergenceTable",
    "Convolution",
    "ExperimentConfig",
    "ExperimentResult",
    "FiniteDifferenceOperator",
    "IncompatibleScheme",
    "JacobiRule",
    "MLDomainError",
    "Monomial",
    "Product",
    "ScalarOperator",
    "Scheme",
    "SeparableProblem",
    "SolveResult",
    "SourceSpec",
    "TimeGrid",
    "bdf2_power_weights",
    "cq_weights",
    "discrete_convolve",
    "eigenpairs",
    "empirical_rate",
    "eval_regularized",
    "eval_source",
    "exact_solution",
    "integrate",
    "jacobi_rule",
    "make_operator",
    "ml",
    "run_experiment",
    "run_oracle_check",
    "scalar_reference",
    "self_difference",
    "solve",
]
