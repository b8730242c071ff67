import json
from pathlib import Path

import pytest

from airoi.config import load_config
from airoi.engine import run_simulation

REPO_ROOT = Path(__file__).resolve().parent.parent
REFERENCE_CONFIG = REPO_ROOT / "portfolios" / "reference_portfolio.json"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def reference_config_path() -> Path:
    return REFERENCE_CONFIG


@pytest.fixture(scope="session")
def reference_config():
    config, diagnostics = load_config(REFERENCE_CONFIG)
    assert config is not None, [str(d) for d in diagnostics]
    return config


@pytest.fixture(scope="session")
def reference_simulation(reference_config):
    """The frozen-golden run: seed 42, 10^4 iterations, shared across tests."""
    return run_simulation(reference_config.portfolio, reference_config.simulation)


def write_config(tmp_path: Path, data: dict, name: str = "config.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(data, indent=2))
    return path


def minimal_config(**overrides) -> dict:
    """A small valid config; tests mutate copies of it."""
    data = {
        "schema_version": 1,
        "name": "minimal",
        "currency": "EUR",
        "horizon_years": 3,
        "discount_rate": 0.05,
        "benefits": [
            {
                "id": "automation",
                "kind": "productivity",
                "freed_hours_per_year": {"kind": "triangular", "lo": 800, "mode": 1000, "hi": 1200},
                "loaded_cost_per_hour": 80.0,
            }
        ],
        "costs": {
            "capex": [
                {"id": "build", "amount": 150000, "useful_life_years": 3}
            ],
            "opex": [
                {"id": "run", "annual_amount": 30000, "start_year": 0, "end_year": 2, "category": "compute"}
            ],
            "rules": {"maintenance_rate": 0.20, "reserve_rate": 0.10, "talent_premium_rate": 0.40},
        },
        "risks": [
            {
                "id": "outage",
                "applies_to": "current_only",
                "sle": {"kind": "point", "value": 20000},
                "frequency": {"kind": "point", "rate": 0.5},
            }
        ],
        "simulation": {"iterations": 200, "master_seed": 7, "worker_count": 1},
    }
    data.update(overrides)
    return data
