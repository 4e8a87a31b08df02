import numpy as np
import pytest

from unique_sampling import UniqueRandomizer, sample_wor
from unique_sampling.adapters.random import sample_iid
from unique_sampling.oracle import exact_tsp
from unique_sampling.programs import TspInstance, greedy_tour, insertion_program

INSTANCES = 200
NODES = 10
SAMPLES = 100
TEMPERATURE = 0.3


@pytest.mark.timeout(1800)
def test_sampling_without_replacement_finds_better_tours():
    streams = np.random.SeedSequence(51).spawn(INSTANCES)
    greedy_gaps, iid_gaps, wor_gaps = [], [], []
    iid_duplicates = wor_duplicates = 0
    for stream in streams:
        rng = np.random.default_rng(stream)
        instance = TspInstance.random(NODES, rng)
        optimum = exact_tsp(instance).cost
        program = insertion_program(instance, TEMPERATURE)

        iid = sample_iid(program, SAMPLES, rng)
        iid_best = min(sample.output.cost for sample in iid)
        iid_duplicates += sum(sample.duplicate for sample in iid)
        unique = sample_wor(program, SAMPLES, UniqueRandomizer(rng))
        wor_best = min(sample.output.cost for sample in unique)

        wor_duplicates += len(unique) - len({sample.output.order for sample in unique})
        greedy_gaps.append(greedy_tour(instance).cost / optimum - 1.0)
        iid_gaps.append(iid_best / optimum - 1.0)
        wor_gaps.append(wor_best / optimum - 1.0)

    assert wor_duplicates == 0
    assert iid_duplicates > 0
    assert min(wor_gaps) >= -1e-9
    assert np.mean(wor_gaps) <= np.mean(iid_gaps)
    assert np.mean(wor_gaps) <= np.mean(greedy_gaps)
