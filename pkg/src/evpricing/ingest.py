"""Charging-session loading, slot aggregation and synthetic scenarios."""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from email.utils import parsedate_to_datetime
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

logger = logging.getLogger(__name__)

MINUTES_PER_DAY = 1440


@dataclass(frozen=True)
class SlotGrid:
    slots_per_day: int = 96
    slot_minutes: int = 15

    def __post_init__(self):
        if self.slots_per_day < 1 or self.slot_minutes < 1:
            raise ValueError("slot grid dimensions must be positive")
        if self.slots_per_day * self.slot_minutes != MINUTES_PER_DAY:
            raise ValueError(
                f"{self.slots_per_day} slots x {self.slot_minutes} min does not cover one day"
            )

    @property
    def T(self) -> int:
        return self.slots_per_day


@dataclass(frozen=True)
class SessionRecord:
    """One charging session. Times are naive UTC datetimes."""

    station_id: str
    connect_time: datetime
    disconnect_time: datetime
    energy_delivered: float

    def __post_init__(self):
        if not self.disconnect_time > self.connect_time:
            raise ValueError("disconnect_time must be after connect_time")
        if not (self.energy_delivered >= 0 and math.isfinite(self.energy_delivered)):
            raise ValueError("energy_delivered must be a finite value >= 0")


@dataclass(frozen=True)
class DemandObservation:
    station_id: str
    slot_index: int
    price: float
    demand: float

    def __post_init__(self):
        if not (self.price > 0 and self.demand > 0):
            raise ValueError("price and demand must both be positive")


def _parse_time(value) -> datetime:
    if isinstance(value, datetime):
        ts = value
    else:
        text = str(value).strip()
        try:
            ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
        except ValueError:
            # ACN's API serves RFC 1123 strings ("Wed, 25 Apr 2018 11:08:04 GMT")
            ts = parsedate_to_datetime(text)
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc).replace(tzinfo=None)
    return ts


def _read_rows(path: Path) -> list:
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        return list(csv.DictReader(text.splitlines()))
    if not text.strip():
        return []
    data = json.loads(text)
    # the ACN API wraps sessions as {"_items": [...]}
    if isinstance(data, dict):
        data = data.get("_items", data.get("sessions", []))
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a JSON array of session objects")
    return data


def load_sessions(path, grid: SlotGrid | None = None):
    """Read a session file in the ACN schema.

    Returns ``(records, n_skipped)``. Rows with missing fields, unparsable
    timestamps, negative energy or a disconnect at/before connect are
    skipped and counted; each one is logged as a warning.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    ValueError
        If the file cannot be parsed or contains zero valid rows.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"session file not found: {path}")
    try:
        rows = _read_rows(path)
    except (json.JSONDecodeError, UnicodeDecodeError, csv.Error) as exc:
        raise ValueError(f"{path}: unreadable session file ({exc})") from exc

    records, skipped = [], 0
    for i, row in enumerate(rows):
        try:
            rec = SessionRecord(
                station_id=str(row["stationID"]),
                connect_time=_parse_time(row["connectionTime"]),
                disconnect_time=_parse_time(row["disconnectTime"]),
                energy_delivered=float(row["kWhDelivered"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            skipped += 1
            logger.warning("%s: skipping row %d (%s)", path, i, exc)
            continue
        records.append(rec)
    if not records:
        raise ValueError(f"{path}: zero valid rows")
    return records, skipped


def slot_demand(sessions: Sequence[SessionRecord], grid: SlotGrid | None = None) -> dict:
    """Mean per-slot energy for each station.

    Each session's energy is spread over the slots it overlaps in proportion
    to the connected minutes inside each slot. Totals are divided by the
    number of distinct calendar days touched by any session.
    """
    grid = grid or SlotGrid()
    if not sessions:
        raise ValueError("no sessions to aggregate")
    width = timedelta(minutes=grid.slot_minutes)
    totals: dict[str, dict] = {}
    days = set()
    for s in sessions:
        duration = (s.disconnect_time - s.connect_time).total_seconds()
        day0 = datetime.combine(s.connect_time.date(), datetime.min.time())
        k = int((s.connect_time - day0) // width)
        per_day = totals.setdefault(s.station_id, {})
        while True:
            start = day0 + k * width
            if start >= s.disconnect_time:
                break
            overlap = (min(start + width, s.disconnect_time) - max(start, s.connect_time)).total_seconds()
            if overlap > 0:
                day, slot = divmod(k, grid.T)
                date = (day0 + timedelta(days=day)).date()
                days.add(date)
                row = per_day.setdefault(date, np.zeros(grid.T))
                row[slot] += s.energy_delivered * overlap / duration
            k += 1

    n_days = len(days)
    out = {}
    for sid in sorted(totals):
        acc = np.zeros(grid.T)
        for row in totals[sid].values():
            acc += row
        out[sid] = acc / n_days
    return out


def pair_with_prices(demand: Mapping[str, np.ndarray], prices, station_ids=None) -> list:
    """Join per-slot demand with a historical price schedule.

    ``prices`` is either a ``{station_id: row}`` mapping or an array of shape
    (n_stations, T) whose rows follow ``station_ids`` (defaults to the sorted
    demand keys). Only cells where both price and demand are positive are kept.
    """
    ids = list(station_ids) if station_ids is not None else sorted(demand)
    if isinstance(prices, Mapping):
        price_rows = {sid: np.asarray(prices[sid], dtype=float) for sid in ids}
    else:
        arr = np.atleast_2d(np.asarray(prices, dtype=float))
        if arr.shape[0] != len(ids):
            raise ValueError(f"price schedule has {arr.shape[0]} rows for {len(ids)} stations")
        price_rows = dict(zip(ids, arr))
    if set(ids) != set(demand):
        raise ValueError("price schedule and demand profile cover different stations")

    obs = []
    for sid in ids:
        d = np.asarray(demand[sid], dtype=float)
        p = price_rows[sid]
        if d.shape != p.shape:
            raise ValueError(f"station {sid}: demand has {d.size} slots, prices {p.size}")
        for t in np.flatnonzero((d > 0) & (p > 0)):
            obs.append(DemandObservation(sid, int(t), float(p[t]), float(d[t])))
    if not obs:
        raise ValueError("no (price, demand) pair with both values positive")
    return obs


def traffic_profile(grid: SlotGrid, peaks=(34, 72), width: float = 6.0, floor: float = 0.25) -> np.ndarray:
    """Double-peaked daily load shape with a positive floor, max 1."""
    t = np.arange(grid.T, dtype=float)
    scale = grid.T / 96
    shape = np.full(grid.T, floor)
    for c in peaks:
        shape += np.exp(-0.5 * ((t - c * scale) / (width * scale)) ** 2)
    return shape / shape.max()


def synth_scenario(
    n_stations: int,
    grid: SlotGrid,
    truth: Sequence[tuple],
    price_history,
    seed: int,
    *,
    p_ref: float = 0.30,
    p_min: float = 0.01,
    p_max: float = 1.0,
    capacity_fraction: float = 0.6,
    profile: np.ndarray | None = None,
    capacity_profile: np.ndarray | None = None,
    station_ids: Sequence[str] | None = None,
):
    """Synthetic instance with known demand-price ground truth.

    ``truth`` holds one ``(a, c, sigma)`` per station. Observed demand for
    every history cell is ``a * P**c * exp(eps)`` with ``eps ~ N(0, sigma^2)``
    drawn from ``np.random.default_rng(seed)``.

    The returned scenario uses the true parameters as its models. Its base
    profile is the station's expected demand at ``p_ref`` shaped by
    ``profile`` (double traffic peak by default, mean 1). Capacity is
    ``capacity_fraction`` of the base-profile peak times ``capacity_profile``
    (a flatter double peak by default, max 1), so it binds around the peaks
    at ``p_ref`` while revenue-optimal load stays non-flat.
    """
    from .demand_model import DemandModelPosterior
    from .objectives import Scenario

    if len(truth) != n_stations:
        raise ValueError(f"expected {n_stations} truth tuples, got {len(truth)}")
    history = np.asarray(price_history, dtype=float).reshape(n_stations, grid.T)
    if np.any(history <= 0):
        raise ValueError("history prices must be positive")
    ids = list(station_ids) if station_ids is not None else [f"CS{i + 1}" for i in range(n_stations)]
    shape = traffic_profile(grid) if profile is None else np.asarray(profile, dtype=float)
    shape = np.broadcast_to(shape / shape.mean(axis=-1, keepdims=True), (n_stations, grid.T))

    rng = np.random.default_rng(seed)
    obs, models = [], {}
    base = np.empty((n_stations, grid.T))
    for i, (sid, (a, c, sigma)) in enumerate(zip(ids, truth)):
        if a <= 0 or sigma < 0:
            raise ValueError(f"station {sid}: need a > 0 and sigma >= 0")
        eps = rng.normal(0.0, sigma, grid.T) if sigma > 0 else np.zeros(grid.T)
        demand = np.exp(math.log(a) + c * np.log(history[i]) + eps)
        obs.extend(
            DemandObservation(sid, t, float(history[i, t]), float(demand[t])) for t in range(grid.T)
        )
        models[sid] = DemandModelPosterior(
            station_id=sid,
            log_a_mean=math.log(a),
            c_mean=float(c),
            covariance=np.zeros((2, 2)),
            noise_variance=float(sigma) ** 2,
            n_obs=grid.T,
        )
        base[i] = a * p_ref**c * math.exp(sigma**2 / 2) * shape[i]

    cap_shape = traffic_profile(grid, floor=0.5) if capacity_profile is None else np.asarray(capacity_profile, dtype=float)
    capacity = capacity_fraction * base.max(axis=1, keepdims=True) * np.broadcast_to(cap_shape, (n_stations, grid.T))
    scenario = Scenario(
        station_ids=ids,
        grid=grid,
        p_min=p_min,
        p_max=p_max,
        p_ref=p_ref,
        capacity=capacity,
        base_profile=base,
        models=models,
    )
    return scenario, obs


def observations_to_json(obs: Sequence[DemandObservation]) -> list:
    return [
        {"station_id": o.station_id, "slot_index": o.slot_index, "price": o.price, "demand": o.demand}
        for o in obs
    ]


def observations_from_json(rows) -> list:
    return [
        DemandObservation(str(r["station_id"]), int(r["slot_index"]), float(r["price"]), float(r["demand"]))
        for r in rows
    ]


def load_observations(path) -> list:
    """Observation file: JSON array (or CSV) with station_id, slot_index, price, demand."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"observation file not found: {path}")
    if path.suffix.lower() == ".csv":
        rows = list(csv.DictReader(path.read_text(encoding="utf-8").splitlines()))
    else:
        rows = json.loads(path.read_text(encoding="utf-8"))
    try:
        return observations_from_json(rows)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: malformed observation ({exc})") from exc


ELASTIC_TRUTH = ((20.0, -1.2, 0.1), (15.0, -1.2, 0.1), (25.0, -1.2, 0.1), (10.0, -1.2, 0.1))


def elastic_scenario(seed: int = 3, history_seed: int = 1):
    """The bundled 4-station, 96-slot elastic instance (c = -1.2).

    History prices are uniform on [0.10, 0.60] $/kWh so every station has
    96 distinct-price observations.
    """
    grid = SlotGrid()
    history = np.random.default_rng(history_seed).uniform(0.10, 0.60, (len(ELASTIC_TRUTH), grid.T))
    return synth_scenario(len(ELASTIC_TRUTH), grid, ELASTIC_TRUTH, history, seed)
