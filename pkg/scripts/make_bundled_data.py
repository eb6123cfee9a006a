"""Regenerate the bundled elastic scenario and experiment config."""
import json
from pathlib import Path

from evpricing.ingest import elastic_scenario
from evpricing.objectives import save_scenario

DATA = Path(__file__).resolve().parents[1] / "src" / "evpricing" / "data"

scenario, obs = elastic_scenario()
scenario = type(scenario)(**{**{k: getattr(scenario, k) for k in scenario.__dataclass_fields__},
                            "observations": obs, "sp_price": 0.30})
save_scenario(scenario, DATA / "elastic_scenario.json")

config = {
    "runs": 5,
    "ga": {"generations": 1000},
    "nsga2": {"population": 100},
    "nsga3": {"population": 92},
    "partitions": 12,
    "importance": [1, 1, 1],
    "sweeps": [[1, 0, 0], [0, 0, 1]],
}
(DATA / "elastic_config.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
print("wrote", DATA)
