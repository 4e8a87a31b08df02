import math

import numpy as np
import pytest
from scipy import stats

from unique_sampling import (
    UniqueRandomizer,
    hge_estimate,
    repeated_hge_estimate,
    sample_wor,
    stochastic_beam_search,
    tge_estimate,
)
from unique_sampling.experiments import estimator_benchmark
from unique_sampling.programs import PositionalSequenceModel


def benchmark(size):
    distribution, f = estimator_benchmark(size)
    model = PositionalSequenceModel((distribution,))
    exact = math.fsum(distribution[i] * f((i,)) for i in range(size))
    return model, f, exact


def assert_unbiased(estimates, exact):
    values = np.asarray(estimates)
    standard_error = values.std(ddof=1) / math.sqrt(len(values))
    assert abs(values.mean() - exact) <= 4.0 * standard_error


@pytest.mark.timeout(600)
def test_hindsight_estimator_is_unbiased():
    model, f, exact = benchmark(20)
    rng = np.random.default_rng(21)

    estimates = []
    for _ in range(20_000):
        sampler = UniqueRandomizer(rng)
        samples = sample_wor(model.program, 5, sampler)
        estimates.append(hge_estimate(samples, f, rng, remaining=sampler.remaining_mass))

    assert_unbiased(estimates, exact)


@pytest.mark.timeout(600)
def test_threshold_estimator_is_unbiased():
    model, f, exact = benchmark(20)
    expander = model.expander()
    rng = np.random.default_rng(22)

    estimates = [tge_estimate(stochastic_beam_search(expander, 5, rng), f) for _ in range(20_000)]

    assert_unbiased(estimates, exact)


def test_exhaustive_samples_give_the_exact_value():
    model, f, exact = benchmark(100)
    rng = np.random.default_rng(23)
    sampler = UniqueRandomizer(rng)
    samples = sample_wor(model.program, 100, sampler)

    assert sampler.remaining_mass == 0.0
    assert hge_estimate(samples, f, rng, remaining=sampler.remaining_mass) == exact
    assert hge_estimate(samples, f, rng, normalized=True, remaining=0.0) == exact
    assert repeated_hge_estimate(samples, f, rng, normalized=True, remaining=0.0) == exact
    assert tge_estimate(stochastic_beam_search(model.expander(), 100, rng), f) == pytest.approx(exact, rel=1e-12)


@pytest.mark.timeout(600)
def test_repeating_hindsight_draws_reduces_variance():
    model, f, _ = benchmark(100)
    rng = np.random.default_rng(24)

    single, repeated = [], []
    for _ in range(2_000):
        sampler = UniqueRandomizer(rng)
        samples = sample_wor(model.program, 20, sampler)
        remaining = sampler.remaining_mass
        single.append(hge_estimate(samples, f, rng, normalized=True, remaining=remaining))
        repeated.append(repeated_hge_estimate(samples, f, rng, normalized=True, repeats=10, remaining=remaining))

    assert np.var(repeated) <= np.var(single)


@pytest.mark.timeout(600)
def test_hindsight_and_threshold_estimates_share_a_distribution(three_leaf_model):
    model, f = three_leaf_model
    rng = np.random.default_rng(25)

    hindsight = []
    for _ in range(5_000):
        sampler = UniqueRandomizer(rng)
        samples = sample_wor(model.program, 2, sampler)
        hindsight.append(hge_estimate(samples, f, rng, remaining=sampler.remaining_mass))
    threshold = [tge_estimate(stochastic_beam_search(model.expander(), 2, rng), f) for _ in range(5_000)]

    assert stats.ks_2samp(hindsight, threshold).pvalue > 1e-4


@pytest.fixture
def three_leaf_model():
    values = {(0,): 1.0, (1,): 5.0, (2,): 10.0}
    return PositionalSequenceModel(([0.7, 0.2, 0.1],)), values.__getitem__
