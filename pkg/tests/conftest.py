import json

import pytest

from loopeval.cli import config as cli_config
from loopeval.experiments import build_riverswim
from loopeval.mrp import MRP, Bernoulli, Deterministic, exact_values


@pytest.fixture
def riverswim():
    return build_riverswim()


@pytest.fixture
def riverswim_values(riverswim):
    return exact_values(riverswim, 0.9)


@pytest.fixture
def self_loop():
    """One state that always returns to itself and pays 1"""
    return MRP([[1.0]], [Deterministic(1.0)], 1.0)


@pytest.fixture
def two_cycle():
    """0 -> 1 -> 0 deterministically, paying 1 at state 0"""
    return MRP([[0.0, 1.0], [1.0, 0.0]], [Deterministic(1.0), Deterministic(0.0)], 1.0)


@pytest.fixture
def bernoulli_mrp():
    return MRP(
        [[0.5, 0.5], [0.25, 0.75]], [Bernoulli(0.5, 2.0), Deterministic(0.5)], 2.0
    )


@pytest.fixture
def write_json(tmp_path):
    def write(doc, name="mrp.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    return write


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep every test away from the user's real configuration file"""
    monkeypatch.delenv("LOOPEVAL_CONFIG", raising=False)
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "xdg"))
    monkeypatch.setenv("HOME", str(tmp_path / "home"))
    cli_config.reset_config()
    yield
    cli_config.reset_config()

