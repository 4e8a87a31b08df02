import itertools
import math

import numpy as np
import pytest

from unique_sampling import KTooLarge, SpaceTooLarge, TooLarge
from unique_sampling.oracle import (
    check_trace_injective,
    enumerate_traces,
    exact_tsp,
    expected_value,
    prefix_partition_holds,
    wor_sequence_distribution,
    wor_set_distribution,
)
from unique_sampling.programs import MarkovSequenceModel, TspInstance, toy_program, tour_cost


def test_toy_table(toy_table):
    assert len(toy_table) == 14
    assert toy_table.total_probability == pytest.approx(1.0)
    assert len(toy_table.internal_prefixes()) == 12
    assert toy_table.probabilities()[(1, 0, 1)] == pytest.approx(0.27)
    assert toy_table.outputs()[(1, 0, 1)] == (0, 1)


def test_enumeration_respects_the_limit():
    with pytest.raises(SpaceTooLarge) as excinfo:
        enumerate_traces(toy_program, max_traces=5)

    assert excinfo.value.limit == 5


def test_enumeration_skips_zero_probability_branches():
    table = enumerate_traces(lambda choice: choice.choose([0.5, 0.0, 0.5]))

    assert [record.trace for record in table] == [(0,), (2,)]


def test_expected_value(toy_table):
    assert expected_value(toy_table, lambda output: 1.0) == pytest.approx(1.0)
    assert expected_value(toy_table, len) == pytest.approx(0.5 * 1 + 0.4 * 2 + 0.1 * 3)


def test_wor_sequence_distribution():
    table = wor_sequence_distribution([0.7, 0.2, 0.1], 2)

    assert len(table) == 6
    assert math.fsum(table.values()) == pytest.approx(1.0)
    assert table[(0, 1)] == pytest.approx(0.7 * 0.2 / 0.3)
    assert table[(2, 0)] == pytest.approx(0.1 * 0.7 / 0.9)


def test_wor_set_distribution():
    table = wor_set_distribution([0.5, 0.3, 0.2, 0.0], 2)

    assert set(table) == {frozenset(pair) for pair in itertools.combinations(range(3), 2)}
    assert math.fsum(table.values()) == pytest.approx(1.0)
    assert table[frozenset({0, 1})] == pytest.approx(0.5 * 0.3 / 0.5 + 0.3 * 0.5 / 0.7)


def test_wor_distribution_rejects_large_k():
    with pytest.raises(KTooLarge):
        wor_sequence_distribution([0.5, 0.5, 0.0], 3)


def test_bundled_programs_are_trace_injective():
    assert check_trace_injective(toy_program)
    assert check_trace_injective(MarkovSequenceModel.uniform(3, 3, order=1).program)


def test_non_injective_program_gives_a_counterexample():
    def parity(choice):
        return choice.choose([0.25] * 4) % 2

    report = check_trace_injective(parity)

    assert not report
    first, second = report.counterexample
    assert first != second
    assert first[0] % 2 == second[0] % 2


def test_prefix_partition_holds_for_the_toy_program(toy_table):
    assert prefix_partition_holds(toy_table)


def test_exact_tsp_on_a_square():
    instance = TspInstance(np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]))

    tour = exact_tsp(instance)

    assert tour.cost == pytest.approx(4.0)
    assert tour.cost == pytest.approx(tour_cost(instance, tour.order))


def test_held_karp_agrees_with_brute_force():
    instance = TspInstance.random(8, np.random.default_rng(13))

    held_karp = exact_tsp(instance)
    brute_force = exact_tsp(instance, method="brute_force")

    assert held_karp.cost == pytest.approx(brute_force.cost)
    assert sorted(held_karp.order) == list(range(8))


def test_exact_tsp_limits():
    with pytest.raises(TooLarge):
        exact_tsp(TspInstance.random(14, np.random.default_rng(0)))
    with pytest.raises(TooLarge):
        exact_tsp(TspInstance.random(10, np.random.default_rng(0)), method="brute_force")
