"""Multi-objective dynamic pricing for EV charging stations.

Demand-price posteriors (:mod:`evpricing.demand_model`) feed revenue, QoS
and peak-to-average objectives (:mod:`evpricing.objectives`), optimized by
NSGA-II / NSGA-III (:mod:`evpricing.moo`) and resolved to one schedule by
pseudo-weight selection (:mod:`evpricing.mcdm`).
"""
from importlib import resources

from .baselines import TouSchedule, stationary, tou
from .demand_model import BayesianDemandRegressor, DemandModelPosterior, FitConfig, elasticity, fit, predict_demand
from .ingest import DemandObservation, SessionRecord, SlotGrid, load_sessions, pair_with_prices, slot_demand, synth_scenario
from .mcdm import ImportanceVector, PseudoWeightSelector, improvement_pct, pseudo_weights, select
from .moo import NSGA2, NSGA3, GaConfig, das_dennis, nsga2_run, nsga3_run
from .objectives import ObjectiveTriple, PriceSchedule, PricingProblem, Scenario, evaluate, load_scenario
from .pareto import ParetoSet

__version__ = "0.1.0"


def bundled_path(name: str):
    """Path of a file shipped in ``evpricing/data`` (e.g. ``elastic_scenario.json``)."""
    return resources.files(__name__) / "data" / name
