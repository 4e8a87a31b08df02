import math

import numpy as np
import pytest

from unique_sampling import (
    DistributionMismatch,
    EmptySpace,
    Exhausted,
    ProgramExpander,
    UniqueRandomizer,
    expansion_counter,
    run_with_replay,
    sample_batch_wor,
    sample_batches,
    sample_wor,
    stochastic_beam_search,
    trace_probability,
)
from unique_sampling.beam import Expansion
from unique_sampling.programs import PositionalSequenceModel, toy_program


class DeadEnd:
    def initial_context(self):
        return None

    def expand(self, state):
        return [Expansion(0, -math.inf), Expansion(1, -math.inf)]


@pytest.mark.parametrize(("length", "k"), [(5, 3), (10, 5), (20, 8)])
def test_beam_search_expansion_count(length, k):
    expander = PositionalSequenceModel.uniform(8, length).expander()

    result = stochastic_beam_search(expander, k, np.random.default_rng(length))

    assert result.expansions == 1 + (length - 1) * k
    assert expansion_counter(result.counters) == result.expansions
    assert len(result) == k
    assert len({sample.trace for sample in result}) == k


def test_beam_search_samples_are_sorted_above_kappa():
    expander = PositionalSequenceModel.uniform(4, 4).expander()

    result = stochastic_beam_search(expander, 5, np.random.default_rng(1))

    keys = [sample.gumbel for sample in result]
    assert keys == sorted(keys, reverse=True)
    assert not result.exhausted
    assert result.kappa < keys[-1]
    for sample in result:
        assert sample.output == sample.trace
        assert sample.probability == pytest.approx(4.0**-4)


def test_beam_search_over_a_small_space_returns_everything():
    result = stochastic_beam_search(ProgramExpander(toy_program), 20, np.random.default_rng(2))

    assert len(result) == 14
    assert result.exhausted
    assert result.kappa == -math.inf
    assert math.fsum(sample.probability for sample in result) == pytest.approx(1.0)
    for sample in result:
        assert sample.probability == pytest.approx(trace_probability(toy_program, sample.trace))
        assert sample.output == run_with_replay(toy_program, sample.trace)[0]


def test_beam_search_is_reproducible_with_threads():
    expander = PositionalSequenceModel.uniform(5, 4).expander()

    serial = stochastic_beam_search(expander, 6, np.random.default_rng(3))
    threaded = stochastic_beam_search(expander, 6, np.random.default_rng(3), max_workers=4)

    assert [(s.trace, s.gumbel) for s in serial] == [(s.trace, s.gumbel) for s in threaded]
    assert serial.kappa == threaded.kappa


def test_beam_search_needs_positive_width():
    with pytest.raises(ValueError):
        stochastic_beam_search(ProgramExpander(toy_program), 0, np.random.default_rng(0))


def test_beam_search_without_positive_traces_raises_empty_space():
    with pytest.raises(EmptySpace):
        stochastic_beam_search(DeadEnd(), 2, np.random.default_rng(0))


def test_batches_exhaust_the_toy_program():
    rng = np.random.default_rng(4)
    sampler = UniqueRandomizer(rng)

    samples = sample_batches(toy_program, sampler, 20, 4, rng)

    assert len(samples) == 14
    assert len({sample.trace for sample in samples}) == 14
    assert sampler.remaining_mass == 0.0
    assert sampler.exhausted
    for sample in samples:
        assert sample.probability == pytest.approx(trace_probability(toy_program, sample.trace))
        assert sample.output == run_with_replay(toy_program, sample.trace)[0]


def test_batches_and_incremental_runs_never_overlap():
    rng = np.random.default_rng(5)
    sampler = UniqueRandomizer(rng)

    batched = sample_batches(toy_program, sampler, 5, 2, rng)
    incremental = sample_wor(toy_program, 20, sampler)

    assert len(batched) == 5
    assert len(incremental) == 9
    assert not {sample.trace for sample in batched} & {sample.trace for sample in incremental}


def test_batch_on_an_exhausted_sampler_raises():
    rng = np.random.default_rng(6)
    sampler = UniqueRandomizer(rng)
    sample_wor(toy_program, 14, sampler)

    with pytest.raises(Exhausted):
        sample_batch_wor(sampler, toy_program, 2, rng)


def test_batch_during_a_run_raises():
    rng = np.random.default_rng(7)
    sampler = UniqueRandomizer(rng)
    sampler.begin_run()

    with pytest.raises(DistributionMismatch):
        sample_batch_wor(sampler, toy_program, 2, rng)


def test_batch_size_must_be_positive():
    rng = np.random.default_rng(8)

    with pytest.raises(ValueError):
        sample_batch_wor(UniqueRandomizer(rng), toy_program, 0, rng)


def test_batch_counts_trie_expansions():
    rng = np.random.default_rng(9)
    sampler = UniqueRandomizer(rng)

    sample_batch_wor(sampler, PositionalSequenceModel.uniform(4, 5).program, 4, rng)

    assert sampler.counters.expansions == 1 + (5 - 1) * 4
