"""Collocation-based semi-analytical transient solver."""

from .layout import (
    CollocationLayout,
    NormalizedPipeConstants,
    UnknownIndexMap,
    compute_constants,
    count_and_index,
    layout_collocation,
)
from .assembly import SasStructure
from .engine import (
    DivergenceError,
    ReverseFlowError,
    SasContext,
    SolverError,
    StepSolution,
    compute_C4,
    eval_bivariate,
)

__all__ = [
    "CollocationLayout",
    "NormalizedPipeConstants",
    "UnknownIndexMap",
    "compute_constants",
    "count_and_index",
    "layout_collocation",
    "SasStructure",
    "SasContext",
    "StepSolution",
    "SolverError",
    "DivergenceError",
    "ReverseFlowError",
    "compute_C4",
    "eval_bivariate",
]
