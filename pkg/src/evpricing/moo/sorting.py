"""Pareto dominance, fast non-dominated sorting and crowding distance."""
from __future__ import annotations

import numpy as np


def dominates(a, b) -> bool:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return bool(np.all(a <= b) and np.any(a < b))


def dominance_matrix(F) -> np.ndarray:
    """``D[i, j]`` is True when member i dominates member j."""
    F = np.asarray(F, dtype=float)
    le = np.all(F[:, None, :] <= F[None, :, :], axis=-1)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=-1)
    return le & lt


def non_dominated_sort(F) -> list:
    """Partition row indices of ``F`` into fronts, best first."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    n = F.shape[0]
    if n == 0:
        raise ValueError("empty population")
    D = dominance_matrix(F)
    n_dominators = D.sum(axis=0)
    remaining = np.ones(n, dtype=bool)
    fronts = []
    while remaining.any():
        front = np.flatnonzero(remaining & (n_dominators == 0))
        fronts.append(front.tolist())
        remaining[front] = False
        n_dominators = n_dominators - D[front].sum(axis=0)
    return fronts


def rank_from_fronts(fronts, n) -> np.ndarray:
    rank = np.empty(n, dtype=int)
    for i, front in enumerate(fronts):
        rank[front] = i
    return rank


def crowding_distance(F) -> np.ndarray:
    F = np.atleast_2d(np.asarray(F, dtype=float))
    n, m = F.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for j in range(m):
        order = np.argsort(F[:, j], kind="stable")
        col = F[order, j]
        span = col[-1] - col[0]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def unique_rows(F) -> np.ndarray:
    """Indices of the first occurrence of each distinct row, in original order."""
    F = np.atleast_2d(np.asarray(F))
    _, first = np.unique(F, axis=0, return_index=True)
    return np.sort(first)
