"""Exact and Monte Carlo laboratory for combinatorial prophet inequalities."""
from .distributions import (
    DiscreteDistribution,
    ProductDistribution,
    RandomizedThreshold,
    expected_max,
    solve_gamma_threshold,
    truncate,
)
from .evaluation import MetricReport, evaluate, evaluate_exact, evaluate_monte_carlo
from .feasibility import ExplicitDC, KUniform, PartitionMatroid, SingleChoice
from .instances import GENERATORS, Instance

__all__ = [
    "DiscreteDistribution", "ProductDistribution", "RandomizedThreshold", "expected_max",
    "solve_gamma_threshold", "truncate", "MetricReport", "evaluate", "evaluate_exact",
    "evaluate_monte_carlo", "ExplicitDC", "KUniform", "PartitionMatroid", "SingleChoice",
    "GENERATORS", "Instance",
]
__version__ = "0.1.0"
