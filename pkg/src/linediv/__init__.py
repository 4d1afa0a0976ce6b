"""Multimodal optimization by direct maximization of the Line Distance."""

from linediv.objective import (
    Bounds,
    ConfigurationError,
    ContractViolation,
    ObjectiveSpec,
    evaluate,
    griewank,
    make_benchmark,
    rastrigin,
)
from linediv.geometry import clip_to_bounds, euclidean, line_distance, sample_direction
from linediv.linesearch import (
    LineSearchParams,
    alpha_max,
    golden_section_max,
    maximize_ld_along,
)
from linediv.engine import Config, RunReport, SearchState, Solution, expand, init, run, step, suppress
from linediv.verify import VerifyParams, count_distinct_optima, is_local_optimum

__all__ = [
    "Bounds",
    "Config",
    "ConfigurationError",
    "ContractViolation",
    "LineSearchParams",
    "ObjectiveSpec",
    "RunReport",
    "SearchState",
    "Solution",
    "VerifyParams",
    "alpha_max",
    "clip_to_bounds",
    "count_distinct_optima",
    "euclidean",
    "evaluate",
    "expand",
    "golden_section_max",
    "griewank",
    "init",
    "is_local_optimum",
    "line_distance",
    "make_benchmark",
    "maximize_ld_along",
    "rastrigin",
    "run",
    "sample_direction",
    "step",
    "suppress",
]
