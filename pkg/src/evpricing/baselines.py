"""Stationary and time-of-use benchmark schedules."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .objectives import PriceSchedule, Scenario

DEFAULT_TOU_PRICES = {"offpeak": 0.15, "normal": 0.30, "peak": 0.50}


def default_peak_slots(T: int = 96, centers=(34, 72), halfwidth: int = 4) -> frozenset:
    scale = T / 96
    out = set()
    for c in centers:
        mid = int(round(c * scale))
        out.update(t for t in range(mid - halfwidth, mid + halfwidth + 1) if 0 <= t < T)
    return frozenset(out)


def default_offpeak_slots(T: int = 96) -> frozenset:
    return frozenset(range(0, int(round(25 * T / 96))))


@dataclass(frozen=True)
class TouSchedule:
    peak_slots: frozenset = field(default_factory=default_peak_slots)
    offpeak_slots: frozenset = field(default_factory=default_offpeak_slots)
    prices: dict = field(default_factory=lambda: dict(DEFAULT_TOU_PRICES))

    def __post_init__(self):
        object.__setattr__(self, "peak_slots", frozenset(int(t) for t in self.peak_slots))
        object.__setattr__(self, "offpeak_slots", frozenset(int(t) for t in self.offpeak_slots))
        if self.peak_slots & self.offpeak_slots:
            raise ValueError("peak and off-peak slots overlap")
        missing = {"peak", "normal", "offpeak"} - set(self.prices)
        if missing:
            raise ValueError(f"ToU prices missing {sorted(missing)}")
        if any(not v > 0 for v in self.prices.values()):
            raise ValueError("ToU prices must be positive")

    def state(self, t: int) -> str:
        if t in self.peak_slots:
            return "peak"
        if t in self.offpeak_slots:
            return "offpeak"
        return "normal"

    @classmethod
    def from_dict(cls, d, T: int = 96) -> "TouSchedule":
        d = d or {}
        return cls(
            peak_slots=d.get("peak_slots", default_peak_slots(T)),
            offpeak_slots=d.get("offpeak_slots", default_offpeak_slots(T)),
            prices={**DEFAULT_TOU_PRICES, **d.get("prices", {})},
        )

    def to_dict(self) -> dict:
        return {
            "peak_slots": sorted(self.peak_slots),
            "offpeak_slots": sorted(self.offpeak_slots),
            "prices": dict(self.prices),
        }


def stationary(s: Scenario, price: float) -> PriceSchedule:
    if not s.p_min <= price <= s.p_max:
        raise ValueError(f"stationary price {price} outside [{s.p_min}, {s.p_max}]")
    return PriceSchedule(np.full(s.shape, float(price)))


def tou(s: Scenario, sched: TouSchedule | None = None) -> PriceSchedule:
    sched = sched or TouSchedule.from_dict(s.tou, s.grid.T)
    bad = {k: v for k, v in sched.prices.items() if not s.p_min <= v <= s.p_max}
    if bad:
        raise ValueError(f"ToU prices outside [{s.p_min}, {s.p_max}]: {bad}")
    row = np.array([sched.prices[sched.state(t)] for t in range(s.grid.T)])
    return PriceSchedule(np.tile(row, (s.n_stations, 1)))


def three_level_search(s: Scenario, sched: TouSchedule | None = None, levels=None, chunk: int = 4096):
    """Exhaustively evaluate every ToU-shaped schedule over a price grid.

    Each of the three traffic states takes one value from ``levels``
    (20 evenly spaced prices in ``[p_min, p_max]`` by default), identical
    across stations. Returns ``(combos, objectives)`` with one row per
    (offpeak, normal, peak) triple and raw (revenue, qos, par) columns.
    """
    from itertools import product

    from .objectives import evaluate_many

    sched = sched or TouSchedule.from_dict(s.tou, s.grid.T)
    levels = np.linspace(s.p_min, s.p_max, 20) if levels is None else np.asarray(levels, dtype=float)
    states = np.array([sched.state(t) for t in range(s.grid.T)])
    combos = np.array(list(product(levels, repeat=3)))
    out = np.empty((len(combos), 3))
    for lo in range(0, len(combos), chunk):
        part = combos[lo : lo + chunk]
        P = np.empty((len(part), *s.shape))
        for j, name in enumerate(("offpeak", "normal", "peak")):
            P[:, :, states == name] = part[:, j, None, None]
        out[lo : lo + chunk] = evaluate_many(s, P)
    return combos, out
