"""Revenue, quality of service and peak-to-average ratio of a price schedule.

All objective functions accept either a single ``(n_stations, T)`` price
matrix or a stack ``(n, n_stations, T)`` and broadcast accordingly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, NamedTuple

import numpy as np

from .demand_model import DemandModelPosterior, models_from_json
from .ingest import SlotGrid, observations_from_json
from .moo.problem import Problem

EPS = 1e-6
REVENUE_MODES = ("capped", "literal")


@dataclass(frozen=True, eq=False)
class Scenario:
    station_ids: list
    grid: SlotGrid
    p_min: float
    p_max: float
    p_ref: float
    capacity: np.ndarray = field(repr=False)
    base_profile: np.ndarray = field(repr=False)
    models: dict = field(repr=False)
    revenue_mode: str = "capped"
    tou: dict | None = None
    sp_price: float | None = None
    observations: list | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 0 < self.p_min < self.p_max:
            raise ValueError(f"need 0 < p_min < p_max, got {self.p_min}, {self.p_max}")
        if self.p_ref <= 0:
            raise ValueError("p_ref must be positive")
        if self.revenue_mode not in REVENUE_MODES:
            raise ValueError(f"revenue_mode must be one of {REVENUE_MODES}")
        shape = (self.n_stations, self.grid.T)
        for name in ("capacity", "base_profile"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            if np.any(arr < 0) or not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} entries must be finite and >= 0")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        missing = [sid for sid in self.station_ids if sid not in self.models]
        if missing:
            raise ValueError(f"no demand model for stations {missing}")
        c = np.array([self.models[sid].c_mean for sid in self.station_ids])[:, None]
        object.__setattr__(self, "_elasticity", c)

    @property
    def n_stations(self) -> int:
        return len(self.station_ids)

    @property
    def shape(self) -> tuple:
        return (self.n_stations, self.grid.T)

    def with_models(self, models: Mapping[str, DemandModelPosterior]) -> "Scenario":
        kw = {k: getattr(self, k) for k in self.__dataclass_fields__}
        kw["models"] = dict(models)
        return Scenario(**kw)

    def to_dict(self) -> dict:
        d = {
            "station_ids": list(self.station_ids),
            "slots_per_day": self.grid.slots_per_day,
            "slot_minutes": self.grid.slot_minutes,
            "p_min": self.p_min,
            "p_max": self.p_max,
            "p_ref": self.p_ref,
            "revenue_mode": self.revenue_mode,
            "capacity": self.capacity.tolist(),
            "base_profile": self.base_profile.tolist(),
            "models": {sid: self.models[sid].to_dict() for sid in self.station_ids},
        }
        if self.tou is not None:
            d["tou"] = self.tou
        if self.sp_price is not None:
            d["sp_price"] = self.sp_price
        if self.observations is not None:
            from .ingest import observations_to_json

            d["observations"] = observations_to_json(self.observations)
        return d

    @classmethod
    def from_dict(cls, d: Mapping, base_dir=None) -> "Scenario":
        """Build from the scenario JSON layout.

        ``models`` may be inline or referenced with ``models_file``; likewise
        ``observations`` / ``observations_file``. Relative file references
        resolve against ``base_dir``.
        """
        base_dir = Path(base_dir) if base_dir is not None else Path(".")
        grid = SlotGrid(int(d.get("slots_per_day", 96)), int(d.get("slot_minutes", 15)))
        ids = [str(s) for s in d["station_ids"]] if "station_ids" in d else [
            f"CS{i + 1}" for i in range(int(d["n_stations"]))
        ]
        if "n_stations" in d and int(d["n_stations"]) != len(ids):
            raise ValueError("n_stations disagrees with station_ids")

        if "models" in d:
            models = models_from_json(d["models"])
        elif "models_file" in d:
            models = models_from_json(json.loads((base_dir / d["models_file"]).read_text(encoding="utf-8")))
        else:
            models = None
        obs = None
        if "observations" in d:
            obs = observations_from_json(d["observations"])
        elif "observations_file" in d:
            from .ingest import load_observations

            obs = load_observations(base_dir / d["observations_file"])
        if models is None:
            if obs is None:
                raise ValueError("scenario needs models, models_file, observations or observations_file")
            from .demand_model import fit

            models = fit(obs)
        return cls(
            station_ids=ids,
            grid=grid,
            p_min=float(d.get("p_min", 0.01)),
            p_max=float(d["p_max"]),
            p_ref=float(d["p_ref"]),
            capacity=np.asarray(d["capacity"], dtype=float),
            base_profile=np.asarray(d["base_profile"], dtype=float),
            models=models,
            revenue_mode=d.get("revenue_mode", "capped"),
            tou=d.get("tou"),
            sp_price=d.get("sp_price"),
            observations=obs,
        )


def load_scenario(path) -> Scenario:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"scenario file not found: {path}")
    return Scenario.from_dict(json.loads(path.read_text(encoding="utf-8")), base_dir=path.parent)


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(json.dumps(s.to_dict(), indent=1) + "\n", encoding="utf-8")


@dataclass(frozen=True, eq=False)
class PriceSchedule:
    prices: np.ndarray

    def __post_init__(self):
        arr = np.array(self.prices, dtype=float)
        if arr.ndim != 2:
            raise ValueError("a price schedule is a (n_stations, T) matrix")
        arr.setflags(write=False)
        object.__setattr__(self, "prices", arr)

    def check(self, s: Scenario, atol: float = 1e-12) -> "PriceSchedule":
        if self.prices.shape != s.shape:
            raise ValueError(f"schedule shape {self.prices.shape} != scenario shape {s.shape}")
        if np.any(self.prices < s.p_min - atol) or np.any(self.prices > s.p_max + atol):
            raise ValueError(f"prices outside [{s.p_min}, {s.p_max}]")
        return self


class ObjectiveTriple(NamedTuple):
    revenue: float
    qos: float
    par: float


def _prices(p):
    return p.prices if isinstance(p, PriceSchedule) else np.asarray(p, dtype=float)


def demand_matrix(s: Scenario, p) -> np.ndarray:
    """Slot profile scaled by each station's model response relative to ``p_ref``.

    ``predict_demand(m, p) / predict_demand(m, p_ref)`` reduces to
    ``(p / p_ref) ** c`` since the intercept and noise terms cancel.
    """
    p = _prices(p)
    ratio = np.exp(s._elasticity * (np.log(p) - np.log(s.p_ref)))
    return s.base_profile * ratio


def delivered(s: Scenario, demand) -> np.ndarray:
    return np.minimum(np.asarray(demand, dtype=float), s.capacity)


def _revenue(s, p, demand, mode):
    billed = delivered(s, demand) if mode == "capped" else demand
    return np.sum(p * billed, axis=(-2, -1))


def _par(demand):
    peak = demand.max(axis=-1, keepdims=True)
    return np.mean(peak / np.maximum(demand, EPS), axis=(-2, -1))


def _qos(s, demand):
    served = delivered(s, demand)
    ratio = np.where(demand <= EPS, 1.0, served / np.maximum(demand, EPS))
    return np.mean(ratio, axis=(-2, -1))


def f_revenue(s: Scenario, p, mode: str | None = None):
    p = _prices(p)
    return _revenue(s, p, demand_matrix(s, p), mode or s.revenue_mode)


def f_par(s: Scenario, p):
    return _par(demand_matrix(s, p))


def f_qos(s: Scenario, p):
    return _qos(s, demand_matrix(s, p))


def evaluate_many(s: Scenario, p) -> np.ndarray:
    """Objective columns (revenue, qos, par) for a stack of schedules."""
    p = _prices(p)
    d = demand_matrix(s, p)
    return np.stack([_revenue(s, p, d, s.revenue_mode), _qos(s, d), _par(d)], axis=-1)


def evaluate(s: Scenario, p) -> ObjectiveTriple:
    """All three objectives from one shared demand matrix."""
    rev, qos, par = evaluate_many(s, _prices(p))
    return ObjectiveTriple(float(rev), float(qos), float(par))


# maximized objectives are negated so the engines only minimize
SENSE = np.array([-1.0, -1.0, 1.0])


class PricingProblem(Problem):
    """Flat genome of length ``n_stations * T`` mapped onto a scenario."""

    objective_names = ("revenue", "qos", "par")

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        super().__init__(
            n_var=scenario.n_stations * scenario.grid.T,
            n_obj=3,
            xl=scenario.p_min,
            xu=scenario.p_max,
            sense=SENSE,
        )

    def evaluate(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        P = X.reshape(X.shape[0], *self.scenario.shape)
        return evaluate_many(self.scenario, P) * self.sense

    def schedule(self, x) -> PriceSchedule:
        return PriceSchedule(np.asarray(x, dtype=float).reshape(self.scenario.shape))
