import math

import numpy as np
import pytest

from digitprime.arith import sieve_table


def factorize(x: int) -> dict[int, int]:
    """Trial division; independent of every sieve in the package."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= x:
        while x % d == 0:
            out[d] = out.get(d, 0) + 1
            x //= d
        d += 1
    if x > 1:
        out[x] = out.get(x, 0) + 1
    return out


def brute_lambda(x: int) -> float:
    if x < 2:
        return 0.0
    f = factorize(x)
    return math.log(next(iter(f))) if len(f) == 1 else 0.0


def brute_mu(x: int) -> int:
    if x < 1:
        return 0
    f = factorize(x)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def rel_close(a, b, rel=1e-9):
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


@pytest.fixture(scope="session")
def vm14():
    return sieve_table(14, "vonMangoldt")


@pytest.fixture(scope="session")
def vm12():
    return sieve_table(12, "vonMangoldt")


@pytest.fixture(scope="session")
def mu12():
    return sieve_table(12, "moebius")


@pytest.fixture(scope="session")
def vm20():
    return sieve_table(20, "vonMangoldt")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
