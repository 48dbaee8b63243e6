"""Shared fixtures: the two-node fixture network and a cached random battery."""

from __future__ import annotations

import functools
from pathlib import Path

import pytest

from feeder.network import Edge, Instance, Network, load_instance
from feeder.oracle import battery
from feeder.problems import FeedInModel, FeedOutModel

DATA = Path(__file__).parent / "data"

BATTERY_SIZE = 100

# criterion number -> (passed, detail); printed in the terminal summary
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def g1_network(demand: float = 10.0, supply: float = 10.0) -> Network:
    return Network(("A", "I"), "I",
                   (Edge("A", "I", 2.0, 5.0), Edge("I", "A", 2.0, 5.0)),
                   {"A": demand}, {"A": supply})


def g1_instance(b: float = 2.5, T: float = 10.0, alpha: float = 1.0, **kw) -> Instance:
    return Instance(g1_network(**kw), T, alpha, cost_factor=b)


@pytest.fixture
def g1() -> Instance:
    return load_instance(DATA / "g1.json")


@pytest.fixture
def g1_model(g1) -> FeedInModel:
    return FeedInModel.build(g1)


@functools.lru_cache(maxsize=None)
def battery_instances(n: int = BATTERY_SIZE) -> tuple:
    return tuple(battery(n))


@functools.lru_cache(maxsize=None)
def feedin_model(seed: int) -> FeedInModel:
    return FeedInModel.build(dict(battery_instances())[seed])


@functools.lru_cache(maxsize=None)
def feedout_model(seed: int) -> FeedOutModel:
    return FeedOutModel.build(dict(battery_instances())[seed])


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: headline acceptance criteria")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
