import math

import numpy as np
import pytest

from binexp.convex_core import ConvexFunction
from binexp.experiments import BinaryExperiment, random_experiment


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_exp():
    """P = (1/2, 1/2), Q = (1/4, 3/4), used by many worked examples."""
    return BinaryExperiment.from_masses([0.5, 0.5], [0.25, 0.75])


def experiments(rng, count, n_max=8, n_min=2):
    return [random_experiment(rng, int(rng.integers(n_min, n_max + 1))) for _ in range(count)]


def xlogx():
    return ConvexFunction(lambda t: t * math.log(t), deriv1=lambda t: math.log(t) + 1,
                          deriv2=lambda t: 1 / t, deriv1_inv=lambda s: math.exp(s - 1),
                          limit_at_zero=0.0, slope_at_infinity=math.inf, name="xlogx")


def square_gen():
    return ConvexFunction(lambda t: (t - 1) ** 2, deriv1=lambda t: 2 * (t - 1),
                          deriv2=lambda t: 2.0, deriv1_inv=lambda s: 1 + s / 2,
                          limit_at_zero=1.0, slope_at_infinity=math.inf, name="sq")


def hellinger_gen():
    return ConvexFunction(lambda t: (math.sqrt(t) - 1) ** 2, limit_at_zero=1.0,
                          slope_at_infinity=1.0, name="hel")


def abs_gen():
    return ConvexFunction(lambda t: abs(t - 1), limit_at_zero=1.0, slope_at_infinity=1.0,
                          kinks=((1.0, 2.0),), name="abs")


# acceptance results, filled by tests/test_acceptance.py and echoed after the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = (ok, detail)
    print(f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
