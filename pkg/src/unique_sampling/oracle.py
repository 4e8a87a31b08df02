"""Brute-force reference computations for small spaces.

Everything here is exhaustive on purpose: trace tables are enumerated by
replaying programs along every positive-probability branch, WOR
distributions are computed by successive renormalisation, and TSP optima by
Held-Karp or by trying every permutation.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from collections.abc import Callable, Hashable, Iterator, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .adapters.probe import probe
from .choice import RandomizedProgram, Trace, resolve_distribution
from .errors import DistributionMismatch, KTooLarge, SpaceTooLarge, TooLarge
from .programs.tsp import Tour, TspInstance, tour_cost

__all__ = [
    "DEFAULT_MAX_TRACES",
    "HELD_KARP_LIMIT",
    "BRUTE_FORCE_LIMIT",
    "InjectivityReport",
    "TraceRecord",
    "TraceTable",
    "check_trace_injective",
    "enumerate_traces",
    "exact_tsp",
    "expected_value",
    "prefix_partition_holds",
    "wor_sequence_distribution",
    "wor_set_distribution",
]

logger = logging.getLogger(__name__)

DEFAULT_MAX_TRACES = 10**6
HELD_KARP_LIMIT = 13
BRUTE_FORCE_LIMIT = 9


@dataclass(frozen=True, slots=True)
class TraceRecord:
    trace: Trace
    output: Hashable
    probability: float


@dataclass(frozen=True, slots=True)
class TraceTable:
    """Every complete trace of a program, in lexicographic trace order."""

    records: tuple[TraceRecord, ...]

    def __iter__(self) -> Iterator[TraceRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def total_probability(self) -> float:
        return math.fsum(record.probability for record in self.records)

    def probabilities(self) -> dict[Trace, float]:
        return {record.trace: record.probability for record in self.records}

    def outputs(self) -> dict[Trace, Hashable]:
        return {record.trace: record.output for record in self.records}

    def internal_prefixes(self) -> set[Trace]:
        """Prefixes at which the program makes a choice."""

        return {record.trace[:depth] for record in self.records for depth in range(len(record.trace))}


def enumerate_traces(program: RandomizedProgram, max_traces: int = DEFAULT_MAX_TRACES) -> TraceTable:
    """Enumerate all positive-probability traces of ``program`` depth first.

    Raises :class:`SpaceTooLarge` as soon as more than ``max_traces`` complete
    traces are found.
    """

    records: list[TraceRecord] = []
    stack: list[tuple[Trace, float]] = [((), 1.0)]
    while stack:
        prefix, probability = stack.pop()
        result = probe(program, prefix)
        if result.terminal:
            if len(records) >= max_traces:
                raise SpaceTooLarge(max_traces)
            records.append(TraceRecord(prefix, result.output, probability))
            continue
        if result.distribution is None:
            raise DistributionMismatch(f"Program gave no distribution after prefix {list(prefix)!r}")
        distribution = resolve_distribution(result.distribution)
        for index in reversed(range(len(distribution))):
            if distribution[index] > 0.0:
                stack.append(((*prefix, index), probability * distribution[index]))
    logger.debug("Enumerated %d traces", len(records))
    return TraceTable(tuple(records))


def expected_value(table: TraceTable, f: Callable[[Hashable], float]) -> float:
    return math.fsum(record.probability * f(record.output) for record in table)


def wor_sequence_distribution(probs: Sequence[float], k: int) -> dict[tuple[int, ...], float]:
    """Exact probability of every ordered sequence of ``k`` draws without replacement."""

    weights = [float(p) for p in probs]
    positive = [index for index, weight in enumerate(weights) if weight > 0.0]
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > len(positive):
        raise KTooLarge(f"Cannot draw {k} items from {len(positive)} with positive probability")
    total = math.fsum(weights)

    result: dict[tuple[int, ...], float] = {}

    def extend(sequence: tuple[int, ...], probability: float, used: float) -> None:
        if len(sequence) == k:
            result[sequence] = probability
            return
        left = total - used
        for index in positive:
            if index in sequence:
                continue
            extend((*sequence, index), probability * weights[index] / left, math.fsum([used, weights[index]]))

    extend((), 1.0, 0.0)
    return result


def wor_set_distribution(probs: Sequence[float], k: int) -> dict[frozenset[int], float]:
    """Exact probability of every unordered set of ``k`` draws without replacement."""

    sets: dict[frozenset[int], list[float]] = defaultdict(list)
    for sequence, probability in wor_sequence_distribution(probs, k).items():
        sets[frozenset(sequence)].append(probability)
    return {key: math.fsum(values) for key, values in sets.items()}


@dataclass(frozen=True, slots=True)
class InjectivityReport:
    """Result of an injectivity check; truthy when the program is trace-injective."""

    injective: bool
    counterexample: tuple[Trace, Trace] | None = None

    def __bool__(self) -> bool:
        return self.injective


def check_trace_injective(program: RandomizedProgram, max_traces: int = DEFAULT_MAX_TRACES) -> InjectivityReport:
    """Check that distinct traces of ``program`` always give distinct outputs."""

    seen: dict[Hashable, Trace] = {}
    for record in enumerate_traces(program, max_traces):
        earlier = seen.setdefault(record.output, record.trace)
        if earlier != record.trace:
            return InjectivityReport(False, (earlier, record.trace))
    return InjectivityReport(True)


def prefix_partition_holds(table: TraceTable) -> bool:
    """Check that at every prefix the next choice partitions the reachable outputs."""

    groups: dict[Trace, dict[int, set[Hashable]]] = defaultdict(lambda: defaultdict(set))
    for record in table:
        for depth in range(len(record.trace)):
            groups[record.trace[:depth]][record.trace[depth]].add(record.output)
    for by_choice in groups.values():
        seen: set[Hashable] = set()
        for outputs in by_choice.values():
            if seen & outputs:
                return False
            seen |= outputs
    return True


def _held_karp(distances: np.ndarray) -> tuple[int, ...]:
    n = distances.shape[0]
    size = 1 << (n - 1)
    cost = np.full((size, n), math.inf)
    parent = np.full((size, n), -1, dtype=int)
    for node in range(1, n):
        cost[1 << (node - 1), node] = distances[0, node]
    for mask in range(1, size):
        for last in range(1, n):
            bit = 1 << (last - 1)
            if not mask & bit or cost[mask, last] == math.inf:
                continue
            for node in range(1, n):
                node_bit = 1 << (node - 1)
                if mask & node_bit:
                    continue
                candidate = cost[mask, last] + distances[last, node]
                if candidate < cost[mask | node_bit, node]:
                    cost[mask | node_bit, node] = candidate
                    parent[mask | node_bit, node] = last
    full = size - 1
    closing = cost[full, 1:] + distances[1:, 0]
    last = int(np.argmin(closing)) + 1
    order = [last]
    mask = full
    while True:
        previous = int(parent[mask, last])
        if previous < 0:
            break
        mask ^= 1 << (last - 1)
        last = previous
        order.append(last)
    return (0, *reversed(order))


def _brute_force(distances: np.ndarray) -> tuple[int, ...]:
    n = distances.shape[0]
    best: tuple[int, ...] | None = None
    best_cost = math.inf
    for permutation in itertools.permutations(range(1, n)):
        if permutation[0] > permutation[-1]:
            continue
        order = (0, *permutation)
        cost = math.fsum(float(distances[order[i], order[(i + 1) % n]]) for i in range(n))
        if cost < best_cost:
            best, best_cost = order, cost
    assert best is not None
    return best


def exact_tsp(instance: TspInstance, *, method: Literal["held_karp", "brute_force"] = "held_karp") -> Tour:
    """Return an optimal tour of ``instance``.

    Raises :class:`TooLarge` above 13 nodes for Held-Karp and above 9 nodes
    for the permutation search.
    """

    n = instance.n
    limit = HELD_KARP_LIMIT if method == "held_karp" else BRUTE_FORCE_LIMIT
    if n > limit:
        raise TooLarge(f"{method} handles at most {limit} nodes, got {n}")
    if n <= 3:
        order = tuple(range(n))
    elif method == "held_karp":
        order = _held_karp(instance.distances)
    else:
        order = _brute_force(instance.distances)
    return Tour(order, tour_cost(instance, order))
