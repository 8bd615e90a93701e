import numpy as np
import pytest

from m2m_recourse import PenaltyConfig, WeightMatrix
from m2m_recourse.files import fixture_path, read_config, read_weights

# (criterion, passed, detail) rows collected by test_acceptance
ACCEPTANCE_RESULTS = []


def load_fixture(name):
    cfg = read_config(fixture_path(f"{name}.cfg"))
    return read_weights(cfg.matrix, cfg.kind, cfg.gamma), cfg


@pytest.fixture(scope="session")
def two_moon_linf():
    return load_fixture("two_moon_linf")


@pytest.fixture(scope="session")
def two_moon_l1():
    return load_fixture("two_moon_l1")


@pytest.fixture(scope="session")
def W_linf(two_moon_linf):
    return two_moon_linf[0]


@pytest.fixture(scope="session")
def W_l1(two_moon_l1):
    return two_moon_l1[0]


def random_weights(rng, n, m):
    # uniform on (0, 1]
    return WeightMatrix(1.0 - rng.random((n, m)))


def random_instance(rng, max_n=6, max_m=4, max_cap=3):
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    return random_weights(rng, n, m), tuple(int(k) for k in rng.integers(0, max_cap + 1, size=m))


def random_penalty(rng, m, total, beta_max=0.2):
    cuts = np.sort(rng.integers(0, total + 1, size=m - 1))
    initial = np.diff(np.concatenate([[0], cuts, [total]]))
    return PenaltyConfig(tuple(rng.uniform(0, beta_max, size=m)), tuple(int(k) for k in initial))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
