import numpy as np
import pytest

from shadowlab.symbolic import SymbolicPoint
from shadowlab.systems import GOLDEN_MEAN, make_full_shift, make_interval_homeo, make_sft


@pytest.fixture(scope="session")
def full2():
    return make_full_shift(2)


@pytest.fixture(scope="session")
def golden():
    return make_sft(GOLDEN_MEAN)


@pytest.fixture(scope="session")
def sqrt_map():
    return make_interval_homeo("sqrt")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_point(rng, k=2, length=64):
    """Finite random point, or eventually periodic with probability 1/2."""
    if rng.random() < 0.5:
        return SymbolicPoint.finite(rng.integers(0, k, size=length))
    pre = rng.integers(0, k, size=int(rng.integers(0, 6)))
    per = rng.integers(0, k, size=int(rng.integers(1, 5)))
    return SymbolicPoint(pre, per)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}")
