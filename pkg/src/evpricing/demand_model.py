"""Bayesian constant-elasticity demand model.

Log demand is regressed on log price with a conjugate Gaussian prior on
``(log a, c)``::

    log D = log a + c * log P + eps,   eps ~ N(0, sigma^2)
    (log a, c) ~ N(m0, sigma^2 / lam * I)

which gives the closed-form posterior mean ``(X'X + lam I)^-1 (X'y + lam m0)``
and covariance ``sigma^2 (X'X + lam I)^-1``, with ``sigma^2`` estimated from
the residuals at the posterior mean.
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_consistent_length, check_is_fitted

POOLED = "__pooled__"


@dataclass(frozen=True)
class FitConfig:
    prior_mean: tuple = (0.0, -1.0)
    prior_precision: float = 0.01
    min_obs_per_station: int = 20

    def __post_init__(self):
        if self.prior_precision < 0:
            raise ValueError("prior_precision must be >= 0")
        if len(self.prior_mean) != 2:
            raise ValueError("prior_mean must be (log_a0, c0)")


@dataclass(frozen=True)
class DemandModelPosterior:
    station_id: str
    log_a_mean: float
    c_mean: float
    covariance: np.ndarray = field(repr=False)
    noise_variance: float
    n_obs: int

    def __post_init__(self):
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (2, 2) or not np.allclose(cov, cov.T) or np.any(np.diag(cov) < 0):
            raise ValueError("covariance must be a symmetric 2x2 matrix with non-negative diagonal")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be >= 0")
        if self.n_obs < 2:
            raise ValueError("a posterior needs at least two observations")
        object.__setattr__(self, "covariance", cov)

    @property
    def a(self) -> float:
        return math.exp(self.log_a_mean)

    def to_dict(self) -> dict:
        return {
            "log_a_mean": self.log_a_mean,
            "c_mean": self.c_mean,
            "covariance": self.covariance.tolist(),
            "noise_variance": self.noise_variance,
            "n_obs": self.n_obs,
        }

    @classmethod
    def from_dict(cls, station_id: str, d: Mapping) -> "DemandModelPosterior":
        return cls(
            station_id=station_id,
            log_a_mean=float(d["log_a_mean"]),
            c_mean=float(d["c_mean"]),
            covariance=np.asarray(d["covariance"], dtype=float),
            noise_variance=float(d["noise_variance"]),
            n_obs=int(d["n_obs"]),
        )


def _posterior(station_id, prices, demand, cfg: FitConfig) -> DemandModelPosterior:
    prices = np.asarray(prices, dtype=float)
    demand = np.asarray(demand, dtype=float)
    n = prices.size
    if n < 2:
        raise ValueError(f"station {station_id}: need at least 2 observations, got {n}")
    lam = float(cfg.prior_precision)
    if lam == 0 and np.unique(prices).size < 2:
        raise ValueError(
            f"station {station_id}: all observations share one price and prior_precision is 0 "
            "(singular design)"
        )
    X = np.column_stack([np.ones(n), np.log(prices)])
    y = np.log(demand)
    m0 = np.asarray(cfg.prior_mean, dtype=float)
    A = X.T @ X + lam * np.eye(2)
    try:
        A_inv = np.linalg.inv(A)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"station {station_id}: singular design matrix") from exc
    mean = np.linalg.solve(A, X.T @ y + lam * m0)
    resid = y - X @ mean
    sigma2 = float(resid @ resid) / max(n - 2, 1)
    cov = sigma2 * A_inv
    cov = 0.5 * (cov + cov.T)
    return DemandModelPosterior(
        station_id=station_id,
        log_a_mean=float(mean[0]),
        c_mean=float(mean[1]),
        covariance=cov,
        noise_variance=sigma2,
        n_obs=n,
    )


def fit(observations: Sequence, cfg: FitConfig | None = None) -> dict:
    """Per-station posteriors from ``DemandObservation`` records.

    Stations with fewer than ``cfg.min_obs_per_station`` observations get
    the posterior fitted on all stations' data pooled together.
    """
    cfg = cfg or FitConfig()
    by_station: dict[str, list] = defaultdict(list)
    for o in observations:
        if not (o.price > 0 and o.demand > 0):
            raise ValueError(f"station {o.station_id}: non-positive price or demand")
        by_station[o.station_id].append((o.price, o.demand))
    if not by_station:
        raise ValueError("no observations to fit")
    for sid, rows in by_station.items():
        if len(rows) < 2:
            raise ValueError(f"station {sid}: need at least 2 observations, got {len(rows)}")

    pooled = None
    out = {}
    for sid in sorted(by_station):
        rows = np.asarray(by_station[sid])
        if len(rows) >= cfg.min_obs_per_station:
            out[sid] = _posterior(sid, rows[:, 0], rows[:, 1], cfg)
            continue
        if pooled is None:
            allrows = np.asarray([r for s in sorted(by_station) for r in by_station[s]])
            pooled = _posterior(POOLED, allrows[:, 0], allrows[:, 1], cfg)
        out[sid] = DemandModelPosterior(
            station_id=sid,
            log_a_mean=pooled.log_a_mean,
            c_mean=pooled.c_mean,
            covariance=pooled.covariance,
            noise_variance=pooled.noise_variance,
            n_obs=pooled.n_obs,
        )
    return out


def predict_demand(model: DemandModelPosterior, price):
    """Posterior-mean expected demand ``exp(log a + c log P + sigma^2 / 2)``."""
    p = np.asarray(price, dtype=float)
    if np.any(~(p > 0)):
        raise ValueError("price must be positive")
    out = np.exp(model.log_a_mean + model.c_mean * np.log(p) + model.noise_variance / 2)
    return float(out) if out.ndim == 0 else out


def elasticity(model: DemandModelPosterior) -> float:
    return model.c_mean


def save_models(models: Mapping[str, DemandModelPosterior], path) -> None:
    doc = {sid: models[sid].to_dict() for sid in sorted(models)}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def models_from_json(doc: Mapping) -> dict:
    return {str(sid): DemandModelPosterior.from_dict(str(sid), d) for sid, d in doc.items()}


def load_models(path) -> dict:
    return models_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


class BayesianDemandRegressor(RegressorMixin, BaseEstimator):
    """Estimator wrapper around :func:`fit` / :func:`predict_demand`.

    ``X`` is a column of prices, ``y`` the observed demand and ``groups``
    the optional station id of each row (one shared model when omitted).
    Predictions are expected demand in the original units.
    """

    def __init__(self, prior_mean=(0.0, -1.0), prior_precision=0.01, min_obs_per_station=20):
        self.prior_mean = prior_mean
        self.prior_precision = prior_precision
        self.min_obs_per_station = min_obs_per_station

    def _config(self) -> FitConfig:
        return FitConfig(
            prior_mean=tuple(self.prior_mean),
            prior_precision=self.prior_precision,
            min_obs_per_station=self.min_obs_per_station,
        )

    def fit(self, X, y, groups=None):
        from .ingest import DemandObservation

        X = check_array(X, ensure_2d=False).reshape(-1)
        y = check_array(y, ensure_2d=False).reshape(-1)
        groups = np.full(X.size, POOLED, dtype=object) if groups is None else np.asarray(groups)
        check_consistent_length(X, y, groups)
        obs = [DemandObservation(str(g), i, float(p), float(d)) for i, (p, d, g) in enumerate(zip(X, y, groups))]
        self.posteriors_ = fit(obs, self._config())
        self.n_features_in_ = 1
        return self

    def predict(self, X, groups=None):
        check_is_fitted(self, "posteriors_")
        X = check_array(X, ensure_2d=False).reshape(-1)
        if groups is None:
            if len(self.posteriors_) != 1:
                raise ValueError("groups are required when several stations were fitted")
            groups = [next(iter(self.posteriors_))] * X.size
        return np.array([predict_demand(self.posteriors_[str(g)], p) for p, g in zip(X, groups)])

    @property
    def elasticities_(self) -> dict:
        check_is_fitted(self, "posteriors_")
        return {sid: m.c_mean for sid, m in self.posteriors_.items()}
