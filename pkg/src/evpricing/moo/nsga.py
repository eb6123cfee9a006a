"""NSGA-II and NSGA-III over box-constrained real genomes.

Both engines share the generational loop (binary tournament on rank then
crowding, SBX, polynomial mutation, (mu + lambda) survival) and differ only
in how the last admitted front is truncated.
"""
from __future__ import annotations

import csv
import io
import logging
import warnings
from dataclasses import asdict, dataclass, fields

import numpy as np
from sklearn.base import BaseEstimator

from ..pareto import ParetoSet
from .operators import polynomial_mutation, sbx_crossover
from .problem import Problem
from .refdirs import ReferencePointSet, das_dennis
from .sorting import crowding_distance, non_dominated_sort, rank_from_fronts, unique_rows

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaConfig:
    population: int = 100
    generations: int = 200
    crossover_prob: float = 0.9
    sbx_eta: float = 15.0
    mutation_prob: float | None = None  # None -> 1 / n_var
    mutation_eta: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.population < 4 or self.population % 2:
            raise ValueError(f"population must be even and >= 4, got {self.population}")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        for name in ("crossover_prob", "mutation_prob"):
            v = getattr(self, name)
            if v is not None and not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")

    @classmethod
    def from_dict(cls, d) -> "GaConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown GA settings: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


NSGA3_DEFAULT_POPULATION = 92


def _as_problem(problem) -> Problem:
    if isinstance(problem, Problem):
        return problem
    from ..objectives import PricingProblem, Scenario

    if isinstance(problem, Scenario):
        return PricingProblem(problem)
    raise TypeError(f"cannot optimize a {type(problem).__name__}")


def _tournament(rank, crowd, n, rng) -> np.ndarray:
    a = rng.integers(0, rank.size, n)
    b = rng.integers(0, rank.size, n)
    coin = rng.random(n) < 0.5
    a_wins = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (crowd[a] > crowd[b]))
    b_wins = (rank[b] < rank[a]) | ((rank[a] == rank[b]) & (crowd[b] > crowd[a]))
    return np.where(a_wins, a, np.where(b_wins, b, np.where(coin, a, b)))


def _rank_and_crowding(F):
    fronts = non_dominated_sort(F)
    rank = rank_from_fronts(fronts, F.shape[0])
    crowd = np.empty(F.shape[0])
    for front in fronts:
        crowd[front] = crowding_distance(F[front])
    return fronts, rank, crowd


def _crowding_survival(F, fronts, n, rng, state):
    chosen = []
    for front in fronts:
        if len(chosen) + len(front) <= n:
            chosen.extend(front)
            if len(chosen) == n:
                break
            continue
        cd = crowding_distance(F[front])
        order = np.argsort(-cd, kind="stable")
        chosen.extend(np.asarray(front)[order[: n - len(chosen)]].tolist())
        break
    return np.asarray(chosen)


class _Niching:
    """NSGA-III survival: normalize, associate to reference lines, fill niches."""

    def __init__(self, refs: ReferencePointSet):
        self.refs = refs.points
        norms = np.linalg.norm(self.refs, axis=1, keepdims=True)
        self.unit = self.refs / norms

    def normalize(self, F, first_front, state):
        ideal = F.min(axis=0)
        Fp = F - ideal
        m = F.shape[1]
        weights = np.full((m, m), 1e-6) + np.eye(m) * (1 - 1e-6)
        asf = np.max(Fp[:, None, :] / weights[None, :, :], axis=2)
        extremes = np.argmin(asf, axis=0)
        denom = None
        try:
            E = Fp[extremes]
            b = np.linalg.solve(E, np.ones(m))
            intercepts = 1.0 / b
            if np.all(np.isfinite(intercepts)) and np.all(intercepts > 1e-10):
                denom = intercepts
        except np.linalg.LinAlgError:
            pass
        if denom is None:
            denom = Fp[first_front].max(axis=0)
            weak = denom <= 1e-10
            denom[weak] = Fp.max(axis=0)[weak]
        flat = denom <= 1e-10
        if flat.any():
            denom = np.where(flat, 1.0, denom)
            state["degenerate_normalization"] = state.get("degenerate_normalization", 0) + 1
            logger.info("degenerate normalization on objectives %s; using unit denominators", np.flatnonzero(flat))
        return Fp / denom

    def associate(self, Fn):
        proj = Fn @ self.unit.T
        perp = np.linalg.norm(Fn[:, None, :] - proj[:, :, None] * self.unit[None, :, :], axis=2)
        niche = np.argmin(perp, axis=1)
        return niche, perp[np.arange(Fn.shape[0]), niche]

    def __call__(self, F, fronts, n, rng, state):
        chosen, last = [], None
        for front in fronts:
            if len(chosen) + len(front) <= n:
                chosen.extend(front)
                if len(chosen) == n:
                    return np.asarray(chosen)
                continue
            last = list(front)
            break
        pool = np.asarray(chosen + last)
        # fronts[0] always leads the pool, so its members are the first positions
        Fn = self.normalize(F[pool], np.arange(len(fronts[0])), state)
        niche, dist = self.associate(Fn)
        k = len(chosen)
        counts = np.bincount(niche[:k], minlength=len(self.refs))

        picked = np.zeros(len(last), dtype=bool)
        last_niche, last_dist = niche[k:], dist[k:]
        selected = []
        # keep the per-objective best of the pool if only the split front holds it
        Fl = F[last]
        for j in range(F.shape[1]):
            best = F[pool, j].min()
            hits = np.flatnonzero(Fl[:, j] == best)
            if k and F[chosen, j].min() <= best:
                continue
            if hits.size and not picked[hits].any() and len(selected) < n - k:
                i = hits[0]
                picked[i] = True
                selected.append(i)
                counts[last_niche[i]] += 1

        active = np.ones(len(self.refs), dtype=bool)
        active[np.setdiff1d(np.arange(len(self.refs)), last_niche)] = False
        while len(selected) < n - k:
            cand = np.flatnonzero(active)
            low = cand[counts[cand] == counts[cand].min()]
            j = low[rng.integers(low.size)] if low.size > 1 else low[0]
            members = np.flatnonzero((last_niche == j) & ~picked)
            if members.size == 0:
                active[j] = False
                continue
            if counts[j] == 0:
                i = members[np.argmin(last_dist[members])]
            else:
                i = members[rng.integers(members.size)]
            picked[i] = True
            selected.append(i)
            counts[j] += 1
        return np.asarray(chosen + [last[i] for i in selected])


def _log_row(gen, F, problem, fronts):
    raw = F * problem.sense
    best = np.where(problem.sense < 0, raw.max(axis=0), raw.min(axis=0))
    row = {"generation": gen}
    row.update({f"best_{name}": float(v) for name, v in zip(problem.objective_names, best)})
    row["front_size"] = len(fronts[0])
    return row


def _run(problem, cfg: GaConfig, survival, callback=None) -> ParetoSet:
    problem = _as_problem(problem)
    rng = np.random.default_rng(cfg.seed)
    n, nv = cfg.population, problem.n_var
    xl, xu = problem.xl, problem.xu
    pm = cfg.mutation_prob if cfg.mutation_prob is not None else 1.0 / nv

    X = xl + rng.random((n, nv)) * (xu - xl)
    F = problem.evaluate(X)
    fronts, rank, crowd = _rank_and_crowding(F)
    history = [_log_row(0, F, problem, fronts)]
    state: dict = {}
    if callback is not None:
        callback(0, X, F)

    for gen in range(1, cfg.generations + 1):
        parents = _tournament(rank, crowd, n, rng)
        c1, c2 = sbx_crossover(
            X[parents[0::2]], X[parents[1::2]], xl, xu, rng, prob=cfg.crossover_prob, eta=cfg.sbx_eta
        )
        kids = np.empty_like(X)
        kids[0::2], kids[1::2] = c1, c2
        kids = polynomial_mutation(kids, xl, xu, rng, prob=pm, eta=cfg.mutation_eta)
        Fk = problem.evaluate(kids)

        XX = np.vstack([X, kids])
        FF = np.vstack([F, Fk])
        keep = survival(FF, non_dominated_sort(FF), n, rng, state)
        X, F = XX[keep], FF[keep]
        fronts, rank, crowd = _rank_and_crowding(F)
        history.append(_log_row(gen, F, problem, fronts))
        if callback is not None:
            callback(gen, X, F)

    first = np.asarray(fronts[0])
    first = first[unique_rows(F[first])]
    shape = getattr(getattr(problem, "scenario", None), "shape", None)
    front = ParetoSet(X[first], F[first], sense=problem.sense, names=problem.objective_names, shape=shape, history=history)
    front.run_state = state
    return front


def nsga2_run(problem, cfg: GaConfig | None = None, callback=None) -> ParetoSet:
    """NSGA-II; ``problem`` is a :class:`Problem` or a pricing ``Scenario``."""
    return _run(problem, cfg or GaConfig(), _crowding_survival, callback)


def nsga3_run(problem, cfg: GaConfig | None = None, refs: ReferencePointSet | None = None, callback=None) -> ParetoSet:
    problem = _as_problem(problem)
    cfg = cfg or GaConfig(population=NSGA3_DEFAULT_POPULATION)
    refs = refs or das_dennis(12, problem.n_obj)
    if refs.n_dims != problem.n_obj:
        raise ValueError(f"reference points have {refs.n_dims} dims, problem has {problem.n_obj} objectives")
    if cfg.population < len(refs):
        warnings.warn(
            f"population {cfg.population} is smaller than the {len(refs)} reference points",
            stacklevel=2,
        )
    return _run(problem, cfg, _Niching(refs), callback)


def history_csv(history) -> str:
    if not history:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(history[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(history)
    return buf.getvalue()


class _Engine(BaseEstimator):
    def __init__(self, population=100, generations=200, crossover_prob=0.9, sbx_eta=15.0,
                 mutation_prob=None, mutation_eta=20.0, seed=0):
        self.population = population
        self.generations = generations
        self.crossover_prob = crossover_prob
        self.sbx_eta = sbx_eta
        self.mutation_prob = mutation_prob
        self.mutation_eta = mutation_eta
        self.seed = seed

    def _config(self) -> GaConfig:
        return GaConfig(**self.get_params())

    def minimize(self, problem) -> ParetoSet:
        self.front_ = self._solve(problem)
        self.history_ = self.front_.history
        return self.front_


class NSGA2(_Engine):
    def _solve(self, problem):
        return nsga2_run(problem, self._config())


class NSGA3(_Engine):
    def __init__(self, population=NSGA3_DEFAULT_POPULATION, generations=200, crossover_prob=0.9,
                 sbx_eta=15.0, mutation_prob=None, mutation_eta=20.0, seed=0, partitions=12):
        super().__init__(population, generations, crossover_prob, sbx_eta, mutation_prob, mutation_eta, seed)
        self.partitions = partitions

    def _config(self) -> GaConfig:
        params = self.get_params()
        params.pop("partitions")
        return GaConfig(**params)

    def _solve(self, problem):
        problem = _as_problem(problem)
        return nsga3_run(problem, self._config(), das_dennis(self.partitions, problem.n_obj))
