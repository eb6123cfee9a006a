"""Command-line entry point: ``evpricing <subcommand> ...``.

Exit codes: 0 success, 2 user/input error, 1 internal failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import baselines, harness, ingest
from .demand_model import FitConfig, fit, save_models
from .mcdm import ImportanceVector, selection_report
from .moo.nsga import history_csv, nsga2_run, nsga3_run
from .moo.refdirs import das_dennis
from .objectives import evaluate, load_scenario
from .pareto import ParetoSet

log = logging.getLogger("evpricing")

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT = 0, 1, 2


def _write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _grid(args) -> ingest.SlotGrid:
    return ingest.SlotGrid(args.slots, args.slot_minutes)


def cmd_ingest(args) -> int:
    grid = _grid(args)
    records, skipped = ingest.load_sessions(args.sessions, grid)
    if skipped:
        print(f"warning: skipped {skipped} malformed row(s) in {args.sessions}", file=sys.stderr)
    if args.site_wide:
        records = [replace(r, station_id=args.site_wide) for r in records]
    demand = ingest.slot_demand(records, grid)
    _write_json(args.out, {
        "slots_per_day": grid.slots_per_day,
        "slot_minutes": grid.slot_minutes,
        "n_sessions": len(records),
        "n_skipped": skipped,
        "profiles": {sid: row.tolist() for sid, row in demand.items()},
    })
    if args.observations_out:
        ids = sorted(demand)
        probe = np.ones((len(ids), grid.T))
        if args.history == "tou":
            sched = baselines.TouSchedule.from_dict({}, grid.T)
            row = np.array([sched.prices[sched.state(t)] for t in range(grid.T)])
            prices = probe * row
        else:
            prices = probe * args.price
        obs = ingest.pair_with_prices(demand, prices, ids)
        _write_json(args.observations_out, ingest.observations_to_json(obs))
    return EXIT_OK


def cmd_fit(args) -> int:
    obs = ingest.load_observations(args.observations)
    cfg = FitConfig(
        prior_mean=tuple(args.prior_mean),
        prior_precision=args.prior_precision,
        min_obs_per_station=args.min_obs,
    )
    models = fit(obs, cfg)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_models(models, args.out)
    for sid, m in models.items():
        log.info("%s: c=%.4f log_a=%.4f n=%d", sid, m.c_mean, m.log_a_mean, m.n_obs)
    return EXIT_OK


def _ga_config(args, engine: str):
    cfg = harness.load_config(args.config)
    ga = cfg.nsga2 if engine == "nsga2" else cfg.nsga3
    over = {k: v for k, v in (("population", args.population), ("generations", args.generations)) if v is not None}
    over["seed"] = args.seed
    return cfg, replace(ga, **over)


def cmd_optimize(args) -> int:
    cfg, ga = _ga_config(args, args.engine)
    scenario = harness.prepare_scenario(args.scenario, cfg)
    if args.engine == "nsga2":
        front = nsga2_run(scenario, ga)
    else:
        front = nsga3_run(scenario, ga, das_dennis(args.partitions or cfg.partitions, 3))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    front.save(out)
    log_path = Path(args.log) if args.log else out.with_suffix(".log.csv")
    log_path.write_text(history_csv(front.history), encoding="utf-8")
    print(f"{len(front)} non-dominated schedules -> {out}")
    return EXIT_OK


def cmd_select(args) -> int:
    front = ParetoSet.load(args.front)
    rep = selection_report(front, ImportanceVector.parse(args.importance))
    if args.out:
        _write_json(args.out, rep)
    print(json.dumps(rep, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_baseline(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.kind == "sp":
        price = args.price if args.price is not None else (scenario.sp_price or scenario.p_ref)
        sched = baselines.stationary(scenario, price)
    else:
        sched = baselines.tou(scenario)
    triple = evaluate(scenario, sched)
    doc = {"kind": args.kind, "prices": sched.prices.tolist(), "objectives": triple._asdict()}
    if args.out:
        _write_json(args.out, doc)
    print(json.dumps(triple._asdict(), sort_keys=True))
    return EXIT_OK


def cmd_report(args) -> int:
    report = harness.run_experiment(args.scenario, args.config, args.seed, out_dir=args.out, runs=args.runs)
    sys.stdout.write(harness.tables_csv(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="evpricing", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="aggregate charging sessions into per-slot demand")
    s.add_argument("sessions")
    s.add_argument("--out", required=True)
    s.add_argument("--slots", type=int, default=96)
    s.add_argument("--slot-minutes", type=int, default=15)
    s.add_argument("--site-wide", metavar="ID", help="pool all stations under one id")
    s.add_argument("--observations-out", help="also write (price, demand) pairs")
    s.add_argument("--history", choices=("sp", "tou"), default="tou", help="historical tariff to pair with")
    s.add_argument("--price", type=float, default=0.30, help="stationary history price")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("fit", help="fit per-station demand-price posteriors")
    s.add_argument("observations")
    s.add_argument("--out", required=True)
    s.add_argument("--prior-mean", type=float, nargs=2, default=(0.0, -1.0), metavar=("LOG_A", "C"))
    s.add_argument("--prior-precision", type=float, default=0.01)
    s.add_argument("--min-obs", type=int, default=20)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("optimize", help="run NSGA-II or NSGA-III on a scenario")
    s.add_argument("--scenario", required=True)
    s.add_argument("--engine", choices=("nsga2", "nsga3"), required=True)
    s.add_argument("--config")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--population", type=int)
    s.add_argument("--generations", type=int)
    s.add_argument("--partitions", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--log", help="per-generation CSV (default: <out>.log.csv)")
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("select", help="pick one schedule from a front")
    s.add_argument("front")
    s.add_argument("--importance", default="1,1,1", help="revenue,qos,par weights")
    s.add_argument("--out")
    s.set_defaults(func=cmd_select)

    s = sub.add_parser("baseline", help="evaluate a stationary or time-of-use schedule")
    s.add_argument("--scenario", required=True)
    s.add_argument("--kind", choices=("sp", "tou"), default="tou")
    s.add_argument("--price", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_baseline)

    s = sub.add_parser("report", help="full experiment with both engines and baselines")
    s.add_argument("--scenario", required=True)
    s.add_argument("--config")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--runs", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except harness.PipelineError as exc:
        cause = exc.__cause__
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT if isinstance(cause, (OSError, ValueError, KeyError, TypeError)) else EXIT_INTERNAL
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
