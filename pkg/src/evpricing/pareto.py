"""Pareto-front container shared by the engines, MCDM and the harness."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .moo.sorting import dominates


class ParetoSet:
    """Non-dominated members of a run.

    ``X`` holds flat genomes, ``F`` minimization-space objectives and
    ``sense`` the sign flip back to raw values (``raw = F * sense``).
    ``shape`` reshapes a genome into a price matrix for pricing problems.
    """

    def __init__(self, X, F, sense=None, names=None, shape=None, history=None):
        self.X = np.atleast_2d(np.asarray(X, dtype=float))
        self.F = np.atleast_2d(np.asarray(F, dtype=float))
        if self.X.shape[0] != self.F.shape[0]:
            raise ValueError("genome and objective counts differ")
        m = self.F.shape[1]
        self.sense = np.ones(m) if sense is None else np.asarray(sense, dtype=float)
        self.names = tuple(names) if names else tuple(f"f{i}" for i in range(m))
        self.shape = tuple(shape) if shape is not None else None
        self.history = history or []
        self.pseudo_weights = None

    def __len__(self):
        return self.F.shape[0]

    @property
    def objectives_raw(self) -> np.ndarray:
        return self.F * self.sense

    def genome(self, i) -> np.ndarray:
        x = self.X[i]
        return x.reshape(self.shape) if self.shape else x

    def is_mutually_non_dominated(self) -> bool:
        return not any(
            dominates(self.F[i], self.F[j]) for i in range(len(self)) for j in range(len(self)) if i != j
        )

    def to_json(self) -> list:
        raw = self.objectives_raw
        out = []
        for i in range(len(self)):
            row = {"genome": self.genome(i).tolist()}
            row.update({name: float(v) for name, v in zip(self.names, raw[i])})
            out.append(row)
        return out

    @classmethod
    def from_json(cls, rows, names=("revenue", "qos", "par"), sense=(-1.0, -1.0, 1.0)) -> "ParetoSet":
        if not rows:
            raise ValueError("empty front")
        genomes = [np.asarray(r["genome"], dtype=float) for r in rows]
        shape = genomes[0].shape if genomes[0].ndim > 1 else None
        X = np.stack([g.reshape(-1) for g in genomes])
        sense = np.asarray(sense, dtype=float)
        F = np.array([[float(r[n]) for n in names] for r in rows]) * sense
        return cls(X, F, sense=sense, names=names, shape=shape)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "ParetoSet":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
