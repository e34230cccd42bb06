import logging

import numpy as np
import pytest

from discrete_ruin import EngineConfig, Exponential, InterestChain, Pareto, ReinsuranceTerms, compute_ruin_table

THETA, ETA = 0.2, 0.25
B_GRID = tuple(np.round(np.arange(2, 11) / 10, 10))
CAPITALS = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)


@pytest.fixture(autouse=True)
def _quiet_engine(caplog):
    caplog.set_level(logging.ERROR, logger="discrete_ruin")


@pytest.fixture(scope="session")
def two_state_chain():
    return InterestChain([0.03, 0.05], [[0.4, 0.6], [0.3, 0.7]], [0.5, 0.5])


@pytest.fixture(scope="session")
def flat_chain():
    return InterestChain.constant(0.0)


def terms(b):
    return ReinsuranceTerms(THETA, ETA, b)


def _tables(model, chain, horizon=10):
    logging.getLogger("discrete_ruin").setLevel(logging.ERROR)
    config = EngineConfig(horizon, targets=CAPITALS)
    return {b: compute_ruin_table(model, terms(b), chain, config) for b in B_GRID}


@pytest.fixture(scope="session")
def exp_tables(two_state_chain):
    return _tables(Exponential(1.0), two_state_chain)


@pytest.fixture(scope="session")
def pareto_tables(two_state_chain):
    return _tables(Pareto(1.25, 1.0), two_state_chain)


ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(name: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE.append((name, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
