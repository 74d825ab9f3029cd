import math

import numpy as np
import pytest

from interplab.couple import Couple, WeightedLp
from interplab.sequences import FinSeq

#: Lines recorded by the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rand_seq(rng, dim, lo=-3, length=5):
    return FinSeq(lo, rng.normal(size=(length, dim)) + 1j * rng.normal(size=(length, dim)), dim)


def rand_couple(rng, dim, ps=(1, 2, 3, math.inf)):
    def one():
        return WeightedLp(ps[rng.integers(len(ps))], tuple(np.exp(rng.uniform(-1, 1, dim))))
    return Couple(dim, one(), one())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
