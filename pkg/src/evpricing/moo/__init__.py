from .nsga import NSGA2, NSGA3, GaConfig, history_csv, nsga2_run, nsga3_run
from .operators import polynomial_mutation, sbx_crossover
from .problem import FunctionProblem, Problem, schaffer_problem
from .refdirs import ReferencePointSet, das_dennis
from .sorting import crowding_distance, dominates, non_dominated_sort

__all__ = [
    "NSGA2", "NSGA3", "GaConfig", "history_csv", "nsga2_run", "nsga3_run",
    "polynomial_mutation", "sbx_crossover", "FunctionProblem", "Problem",
    "schaffer_problem", "ReferencePointSet", "das_dennis", "crowding_distance",
    "dominates", "non_dominated_sort",
]
