import math
import os

import numpy as np
import pytest

from unique_sampling.config import ENV_PREFIX
from unique_sampling.oracle import enumerate_traces
from unique_sampling.programs import ExplicitProgram, toy_program


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for key in list(os.environ):
        if key.startswith(ENV_PREFIX):
            monkeypatch.delenv(key)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def toy_table():
    return enumerate_traces(toy_program)


@pytest.fixture
def three_leaf():
    return ExplicitProgram({(0,): 0.7, (1,): 0.2, (2,): 0.1})


@pytest.fixture
def two_level():
    return ExplicitProgram(
        {
            (0, 0): 0.5 * 0.6,
            (0, 1): 0.5 * 0.4,
            (1, 0): 0.3 * 0.6,
            (1, 1): 0.3 * 0.4,
            (2, 0): 0.2 * 0.6,
            (2, 1): 0.2 * 0.4,
        }
    )


def unsampled_mass(table, sampled, prefix):
    """Total probability of the unsampled traces starting with ``prefix``."""

    return math.fsum(
        record.probability
        for record in table
        if record.trace[: len(prefix)] == prefix and record.trace not in sampled
    )
