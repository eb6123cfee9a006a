"""Pseudo-weight decision making over a Pareto front."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .pareto import ParetoSet

BALANCED = (1 / 3, 1 / 3, 1 / 3)


class ImportanceVector:
    """Non-negative metric importance (revenue, qos, par), normalized to sum 1."""

    def __init__(self, weights=BALANCED):
        w = np.asarray(weights, dtype=float).reshape(-1)
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("importance weights must be finite and >= 0")
        if not np.any(w > 0):
            raise ValueError("at least one importance weight must be positive")
        self.weights = w / w.sum()

    @classmethod
    def parse(cls, text: str) -> "ImportanceVector":
        """From ``"r,q,p"`` as given on the command line."""
        try:
            parts = [float(v) for v in text.split(",")]
        except ValueError as exc:
            raise ValueError(f"bad importance {text!r}: expected three comma-separated numbers") from exc
        if len(parts) != 3:
            raise ValueError(f"bad importance {text!r}: expected three comma-separated numbers")
        return cls(parts)

    def __repr__(self):
        return f"ImportanceVector({self.weights.tolist()})"


def _F(front) -> np.ndarray:
    return front.F if isinstance(front, ParetoSet) else np.atleast_2d(np.asarray(front, dtype=float))


def pseudo_weights(front) -> np.ndarray:
    """Per-member pseudo-weights from minimization-space objectives.

    Weight i is the member's normalized distance from the front's worst
    value in objective i, renormalized over objectives. Objectives with zero
    range across the front contribute 0; a member whose terms are all zero
    (only possible when every objective is constant) gets equal weights.
    """
    F = _F(front)
    if F.shape[0] == 0:
        raise ValueError("empty front")
    fmax, fmin = F.max(axis=0), F.min(axis=0)
    span = fmax - fmin
    terms = np.where(span > 0, (fmax - F) / np.where(span > 0, span, 1.0), 0.0)
    total = terms.sum(axis=1, keepdims=True)
    m = F.shape[1]
    W = np.where(total > 0, terms / np.where(total > 0, total, 1.0), 1.0 / m)
    if isinstance(front, ParetoSet):
        front.pseudo_weights = W
    return W


def _select_index(F, W, target, revenue_col=0, tol=1e-12) -> int:
    dist = np.linalg.norm(W - target, axis=1)
    near = np.flatnonzero(dist <= dist.min() + tol)
    if near.size == 1:
        return int(near[0])
    # higher revenue is lower minimization-space value
    rev = F[near, revenue_col]
    near = near[rev <= rev.min() + tol * max(1.0, abs(rev.min()))]
    return int(near[0])


def select(front, importance=None) -> int:
    """Index of the member whose pseudo-weights are nearest the importance vector.

    Ties go to the higher-revenue member (objective 0), then the lower index.
    """
    if not isinstance(importance, ImportanceVector):
        importance = ImportanceVector(BALANCED if importance is None else importance)
    F = _F(front)
    W = pseudo_weights(front)
    if importance.weights.size != F.shape[1]:
        raise ValueError(f"importance has {importance.weights.size} entries for {F.shape[1]} objectives")
    return _select_index(F, W, importance.weights)


def selection_report(front: ParetoSet, importance=None) -> dict:
    imp = importance if isinstance(importance, ImportanceVector) else ImportanceVector(importance or BALANCED)
    idx = select(front, imp)
    return {
        "selected_index": idx,
        "pseudo_weights": front.pseudo_weights[idx].tolist(),
        "importance": imp.weights.tolist(),
        "objectives_raw": dict(zip(front.names, front.objectives_raw[idx].tolist())),
    }


def improvement_pct(new: float, old: float, direction: str = "maximize") -> float:
    if old == 0:
        raise ValueError("improvement relative to a zero baseline is undefined")
    if direction == "maximize":
        return 100.0 * (new - old) / old
    if direction == "minimize":
        return 100.0 * (old - new) / old
    raise ValueError(f"direction must be 'maximize' or 'minimize', got {direction!r}")


class PseudoWeightSelector(BaseEstimator):
    """``fit`` on a front's objective matrix, ``predict`` the chosen row.

    ``X`` is in minimization space, revenue in column 0.
    """

    def __init__(self, importance=BALANCED):
        self.importance = importance

    def fit(self, X, y=None):
        X = check_array(X)
        self.F_ = X
        self.pseudo_weights_ = pseudo_weights(X)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X=None) -> int:
        check_is_fitted(self, "pseudo_weights_")
        F = self.F_ if X is None else check_array(X)
        W = self.pseudo_weights_ if X is None else pseudo_weights(F)
        return _select_index(F, W, ImportanceVector(self.importance).weights)
