import numpy as np
import pytest

from unique_sampling import TraceMismatch, trace_probability
from unique_sampling.adapters import RandomSource, sample_iid
from unique_sampling.instrumentation import Counters
from unique_sampling.programs import toy_program


def test_sample_iid_flags_repeated_traces():
    samples = sample_iid(lambda choice: choice.choose([0.5, 0.5]), 10, np.random.default_rng(0))

    seen = set()
    for sample in samples:
        assert sample.duplicate == (sample.trace in seen)
        seen.add(sample.trace)
    assert sum(sample.duplicate for sample in samples) == 10 - len(seen)


def test_sample_iid_reports_trace_probabilities():
    for sample in sample_iid(toy_program, 20, np.random.default_rng(1)):
        assert sample.probability == pytest.approx(trace_probability(toy_program, sample.trace))


def test_sample_iid_is_reproducible():
    first = sample_iid(toy_program, 8, np.random.default_rng(2))
    second = sample_iid(toy_program, 8, np.random.default_rng(2))

    assert first == second


def test_random_source_counts_every_choice():
    counters = Counters()

    sample_iid(toy_program, 5, np.random.default_rng(3), counters=counters)

    assert counters.runs == 5
    assert counters.choices == counters.distribution_computations
    assert counters.choices >= 10


def test_random_source_needs_distributions():
    source = RandomSource(np.random.default_rng(0))

    with pytest.raises(TraceMismatch):
        source.choose(None)


def test_negative_sample_count():
    with pytest.raises(ValueError):
        sample_iid(toy_program, -1, np.random.default_rng(0))
