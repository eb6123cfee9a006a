"""End-to-end experiment: fit, optimize with both engines, select, benchmark."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import TouSchedule, stationary, tou
from .demand_model import FitConfig, fit
from .mcdm import BALANCED, ImportanceVector, improvement_pct, select
from .moo.nsga import NSGA3_DEFAULT_POPULATION, GaConfig, nsga2_run, nsga3_run
from .moo.refdirs import das_dennis
from .objectives import Scenario, evaluate, load_scenario
from .pareto import ParetoSet

logger = logging.getLogger(__name__)

ENGINES = ("BM+NSGA-II", "BM+NSGA-III")
APPROACHES = ("SP", "ToU") + ENGINES
METRICS = ("revenue", "qos", "par")
DIRECTIONS = {"revenue": "maximize", "qos": "maximize", "par": "minimize"}
_ENGINE_TAG = {"BM+NSGA-II": 2, "BM+NSGA-III": 3}


class PipelineError(RuntimeError):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"[{stage}] {exc}")
        self.stage = stage
        self.__cause__ = exc


@dataclass
class ExperimentConfig:
    runs: int = 5
    nsga2: GaConfig = field(default_factory=GaConfig)
    nsga3: GaConfig = field(default_factory=lambda: GaConfig(population=NSGA3_DEFAULT_POPULATION))
    partitions: int = 12
    fit: FitConfig = field(default_factory=FitConfig)
    refit: bool = True
    importance: tuple = BALANCED
    sweeps: tuple = ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0))
    n_jobs: int = 1

    @classmethod
    def from_dict(cls, d) -> "ExperimentConfig":
        d = dict(d or {})
        known = {"runs", "nsga2", "nsga3", "partitions", "fit", "refit", "importance", "sweeps", "n_jobs", "ga"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        shared = d.pop("ga", {})
        cfg = cls()
        cfg.runs = int(d.get("runs", cfg.runs))
        if cfg.runs < 1:
            raise ValueError("runs must be >= 1")
        cfg.nsga2 = GaConfig.from_dict({**shared, **d.get("nsga2", {})})
        cfg.nsga3 = GaConfig.from_dict({"population": NSGA3_DEFAULT_POPULATION, **shared, **d.get("nsga3", {})})
        cfg.partitions = int(d.get("partitions", cfg.partitions))
        if "fit" in d:
            f = d["fit"]
            cfg.fit = FitConfig(
                prior_mean=tuple(f.get("prior_mean", cfg.fit.prior_mean)),
                prior_precision=float(f.get("prior_precision", cfg.fit.prior_precision)),
                min_obs_per_station=int(f.get("min_obs_per_station", cfg.fit.min_obs_per_station)),
            )
        cfg.refit = bool(d.get("refit", cfg.refit))
        cfg.importance = tuple(ImportanceVector(d.get("importance", cfg.importance)).weights)
        cfg.sweeps = tuple(tuple(ImportanceVector(w).weights) for w in d.get("sweeps", cfg.sweeps))
        cfg.n_jobs = int(d.get("n_jobs", cfg.n_jobs))
        return cfg

    def to_dict(self) -> dict:
        return {
            "runs": self.runs,
            "nsga2": self.nsga2.to_dict(),
            "nsga3": self.nsga3.to_dict(),
            "partitions": self.partitions,
            "fit": {
                "prior_mean": list(self.fit.prior_mean),
                "prior_precision": self.fit.prior_precision,
                "min_obs_per_station": self.fit.min_obs_per_station,
            },
            "refit": self.refit,
            "importance": list(self.importance),
            "sweeps": [list(w) for w in self.sweeps],
        }


def load_config(path=None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    return ExperimentConfig.from_dict(json.loads(path.read_text(encoding="utf-8")))


def run_seed(master: int, run: int, engine: str) -> int:
    """Per-(run, engine) seed, independent of execution order."""
    return int(np.random.SeedSequence([int(master), int(run), _ENGINE_TAG[engine]]).generate_state(1)[0])


def _solve(scenario: Scenario, cfg: ExperimentConfig, engine: str, seed: int) -> ParetoSet:
    if engine == "BM+NSGA-II":
        return nsga2_run(scenario, GaConfig(**{**cfg.nsga2.to_dict(), "seed": seed}))
    refs = das_dennis(cfg.partitions, 3)
    return nsga3_run(scenario, GaConfig(**{**cfg.nsga3.to_dict(), "seed": seed}), refs)


def _triple(t) -> dict:
    return {m: float(v) for m, v in zip(METRICS, t)}


def _quantiles(values) -> dict:
    q = np.quantile(np.asarray(values, dtype=float), [0.0, 0.25, 0.5, 0.75, 1.0])
    return dict(zip(("min", "q1", "median", "q3", "max"), (float(v) for v in q)))


def _improvements(averages: dict) -> dict:
    out = {}
    for base in ("SP", "ToU"):
        rows = {}
        for name in APPROACHES:
            if name == base or (base == "ToU" and name == "SP"):
                continue
            rows[name] = {
                m: improvement_pct(averages[name][m], averages[base][m], DIRECTIONS[m]) for m in METRICS
            }
        out[f"over_{base}"] = rows
    return out


def importance_sweep(fronts: dict, importance, balanced=BALANCED) -> dict:
    """Re-select every persisted front under ``importance``.

    Returns, per engine, the selected triples per run and the average
    improvement of each metric relative to the balanced selection.
    """
    imp = importance if isinstance(importance, ImportanceVector) else ImportanceVector(importance)
    out = {}
    for engine, runs in fronts.items():
        if not runs or any(len(f) == 0 for f in runs):
            raise ValueError(f"{engine}: empty front")
        chosen, base = [], []
        for f in runs:
            raw = f.objectives_raw
            chosen.append(_triple(raw[select(f, imp)]))
            base.append(_triple(raw[select(f, balanced)]))
        avg_new = {m: float(np.mean([c[m] for c in chosen])) for m in METRICS}
        avg_old = {m: float(np.mean([b[m] for b in base])) for m in METRICS}
        out[engine] = {
            "selected": chosen,
            "balanced": base,
            "average": avg_new,
            "improvement_vs_balanced": {m: improvement_pct(avg_new[m], avg_old[m], DIRECTIONS[m]) for m in METRICS},
        }
    return out


def build_report(scenario: Scenario, fronts: dict, cfg: ExperimentConfig, seed: int, config_hash: str) -> dict:
    """Assemble the report from already-computed fronts (no optimization)."""
    sp_price = scenario.sp_price if scenario.sp_price is not None else scenario.p_ref
    tou_sched = TouSchedule.from_dict(scenario.tou, scenario.grid.T)
    samples = {
        "SP": [_triple(evaluate(scenario, stationary(scenario, sp_price)))] * cfg.runs,
        "ToU": [_triple(evaluate(scenario, tou(scenario, tou_sched)))] * cfg.runs,
    }
    selected_index = {}
    for engine in ENGINES:
        idx = [select(f, cfg.importance) for f in fronts[engine]]
        selected_index[engine] = idx
        samples[engine] = [_triple(f.objectives_raw[i]) for f, i in zip(fronts[engine], idx)]
    averages = {a: {m: float(np.mean([s[m] for s in samples[a]])) for m in METRICS} for a in APPROACHES}
    return {
        "averages": averages,
        "improvement": _improvements(averages),
        "samples": samples,
        "boxplot": {a: {m: _quantiles([s[m] for s in samples[a]]) for m in METRICS} for a in APPROACHES},
        "selected_index": selected_index,
        "front_sizes": {e: [len(f) for f in fronts[e]] for e in ENGINES},
        "steering": {
            ",".join(f"{w:.6g}" for w in imp): importance_sweep(fronts, imp, cfg.importance) for imp in cfg.sweeps
        },
        "metadata": {
            "seed": int(seed),
            "config_hash": config_hash,
            "runs": cfg.runs,
            "run_seeds": {e: [run_seed(seed, r, e) for r in range(cfg.runs)] for e in ENGINES},
            "sp_price": sp_price,
            "tou": tou_sched.to_dict(),
            "elasticity": {sid: scenario.models[sid].c_mean for sid in scenario.station_ids},
            "config": cfg.to_dict(),
        },
    }


def _hash(scenario: Scenario, cfg: ExperimentConfig) -> str:
    blob = json.dumps({"scenario": scenario.to_dict(), "config": cfg.to_dict()}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def prepare_scenario(scenario_path, cfg: ExperimentConfig) -> Scenario:
    try:
        scenario = load_scenario(scenario_path)
    except Exception as exc:
        raise PipelineError("load", exc) from exc
    if cfg.refit and scenario.observations:
        try:
            scenario = scenario.with_models(fit(scenario.observations, cfg.fit))
        except Exception as exc:
            raise PipelineError("fit", exc) from exc
    return scenario


def optimize_all(scenario: Scenario, cfg: ExperimentConfig, seed: int) -> dict:
    jobs = [(e, r) for e in ENGINES for r in range(cfg.runs)]
    try:
        if cfg.n_jobs != 1:
            from joblib import Parallel, delayed

            results = Parallel(n_jobs=cfg.n_jobs)(
                delayed(_solve)(scenario, cfg, e, run_seed(seed, r, e)) for e, r in jobs
            )
        else:
            results = [_solve(scenario, cfg, e, run_seed(seed, r, e)) for e, r in jobs]
    except Exception as exc:
        raise PipelineError("optimize", exc) from exc
    fronts = {e: [] for e in ENGINES}
    for (e, _), f in zip(jobs, results):
        fronts[e].append(f)
    return fronts


def run_experiment(scenario_path, config_path=None, seed: int = 0, out_dir=None, runs: int | None = None) -> dict:
    """Run the full pipeline; writes report files when ``out_dir`` is given.

    ``runs`` overrides the configured number of seeded runs per engine.
    """
    t0 = time.perf_counter()
    try:
        cfg = load_config(config_path)
        if runs is not None:
            if runs < 1:
                raise ValueError("runs must be >= 1")
            cfg.runs = int(runs)
    except Exception as exc:
        raise PipelineError("config", exc) from exc
    scenario = prepare_scenario(scenario_path, cfg)
    t_fit = time.perf_counter()
    fronts = optimize_all(scenario, cfg, seed)
    t_opt = time.perf_counter()
    try:
        report = build_report(scenario, fronts, cfg, seed, _hash(scenario, cfg))
    except Exception as exc:
        raise PipelineError("report", exc) from exc
    timings = {
        "fit_seconds": t_fit - t0,
        "optimize_seconds": t_opt - t_fit,
        "report_seconds": time.perf_counter() - t_opt,
    }
    if out_dir is not None:
        write_outputs(out_dir, report, fronts, timings)
    report_obj = dict(report)
    report_obj["_fronts"] = fronts
    report_obj["_timings"] = timings
    return report_obj


def regenerate_report(out_dir, scenario_path, config_path=None, seed: int = 0, runs: int | None = None) -> dict:
    """Rebuild report.json content from ``fronts.json`` without re-optimizing."""
    cfg = load_config(config_path)
    if runs is not None:
        cfg.runs = int(runs)
    scenario = prepare_scenario(scenario_path, cfg)
    doc = json.loads((Path(out_dir) / "fronts.json").read_text(encoding="utf-8"))
    fronts = {e: [ParetoSet.from_json(rows) for rows in doc[e]] for e in ENGINES}
    return build_report(scenario, fronts, cfg, seed, _hash(scenario, cfg))


def report_json(report: dict) -> str:
    clean = {k: v for k, v in report.items() if not k.startswith("_")}
    return json.dumps(clean, indent=2, sort_keys=True) + "\n"


def tables_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["table", "approach", *METRICS])
    for a in APPROACHES:
        w.writerow(["average", a, *(repr(report["averages"][a][m]) for m in METRICS)])
    for key, rows in report["improvement"].items():
        for a, vals in rows.items():
            w.writerow([f"improvement_{key}", a, *(f"{vals[m]:.2f}" for m in METRICS)])
    return buf.getvalue()


def boxplot_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    stats = ("min", "q1", "median", "q3", "max")
    w.writerow(["approach", "metric", *stats])
    for a in APPROACHES:
        for m in METRICS:
            q = report["boxplot"][a][m]
            w.writerow([a, m, *(repr(q[s]) for s in stats)])
    return buf.getvalue()


def write_outputs(out_dir, report: dict, fronts: dict, timings: dict | None = None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report_json(report), encoding="utf-8")
    (out / "tables.csv").write_text(tables_csv(report), encoding="utf-8")
    (out / "boxplot.csv").write_text(boxplot_csv(report), encoding="utf-8")
    doc = {e: [f.to_json() for f in fronts[e]] for e in ENGINES}
    (out / "fronts.json").write_text(json.dumps(doc) + "\n", encoding="utf-8")
    if timings is not None:
        (out / "timings.json").write_text(json.dumps(timings, indent=2) + "\n", encoding="utf-8")
    return out
