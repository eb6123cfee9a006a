"""Box-constrained minimization problems the engines operate on."""
from __future__ import annotations

import numpy as np


class Problem:
    """Vectorized objective function over a box.

    Subclasses implement ``evaluate(X) -> F`` with ``X`` of shape
    ``(n, n_var)`` and ``F`` of shape ``(n, n_obj)`` in minimization space.
    ``sense`` maps F back to the user's orientation (``raw = F * sense``).
    """

    objective_names: tuple = ()

    def __init__(self, n_var, n_obj, xl, xu, sense=None):
        self.n_var = int(n_var)
        self.n_obj = int(n_obj)
        self.xl = np.broadcast_to(np.asarray(xl, dtype=float), (self.n_var,)).copy()
        self.xu = np.broadcast_to(np.asarray(xu, dtype=float), (self.n_var,)).copy()
        if np.any(self.xl > self.xu):
            raise ValueError("lower bound exceeds upper bound")
        self.sense = np.ones(self.n_obj) if sense is None else np.asarray(sense, dtype=float)
        if not self.objective_names:
            self.objective_names = tuple(f"f{i}" for i in range(self.n_obj))

    def evaluate(self, X) -> np.ndarray:
        raise NotImplementedError


class FunctionProblem(Problem):
    """Adapter for a plain function ``f(X) -> F`` (already minimization space)."""

    def __init__(self, func, n_var, n_obj, xl, xu, names=None):
        self.func = func
        if names:
            self.objective_names = tuple(names)
        super().__init__(n_var, n_obj, xl, xu)

    def evaluate(self, X) -> np.ndarray:
        return np.asarray(self.func(np.atleast_2d(X)), dtype=float).reshape(-1, self.n_obj)


def schaffer_problem() -> FunctionProblem:
    """``min (x^2, (x-2)^2)`` on ``[-1, 3]``; Pareto set is ``x in [0, 2]``."""
    return FunctionProblem(
        lambda X: np.column_stack([X[:, 0] ** 2, (X[:, 0] - 2.0) ** 2]),
        n_var=1,
        n_obj=2,
        xl=-1.0,
        xu=3.0,
    )
