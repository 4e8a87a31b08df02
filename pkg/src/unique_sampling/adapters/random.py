"""Plain random-number choice source and the i.i.d. sampling baseline."""

from __future__ import annotations

from collections.abc import Hashable
from dataclasses import dataclass

import numpy as np

from unique_sampling.choice import (
    ChoiceSource,
    DistributionLike,
    RandomizedProgram,
    Trace,
    resolve_distribution,
    select_proportional,
)
from unique_sampling.errors import TraceMismatch
from unique_sampling.instrumentation import Counters

__all__ = ["IidSample", "RandomSource", "sample_iid"]


class RandomSource(ChoiceSource):
    """Sample every choice independently from its distribution.

    Each call consumes exactly one uniform variate from ``rng``, the same
    discipline the trie samplers use, so runs are bit-reproducible per seed.
    """

    __slots__ = ("_rng", "_counters", "_trace", "_probability")

    def __init__(self, rng: np.random.Generator, *, counters: Counters | None = None) -> None:
        self._rng = rng
        self._counters = counters if counters is not None else Counters()
        self._trace: list[int] = []
        self._probability = 1.0

    @property
    def counters(self) -> Counters:
        return self._counters

    def choose(self, distribution: DistributionLike | None) -> int:
        if distribution is None:
            raise TraceMismatch(
                "Independent sampling needs the distribution of every choice",
                trace=self._trace,
                position=len(self._trace),
            )
        resolved = resolve_distribution(distribution)
        self._counters.distribution_computations += 1
        self._counters.choices += 1
        index = select_proportional(resolved.weights, float(self._rng.random()))
        self._trace.append(index)
        self._probability *= resolved[index]
        return index

    def finish(self) -> tuple[Trace, float]:
        """Return the trace and probability of the finished run and start a new one."""

        trace, probability = tuple(self._trace), self._probability
        self._trace = []
        self._probability = 1.0
        self._counters.runs += 1
        return trace, probability


@dataclass(frozen=True, slots=True)
class IidSample:
    """One i.i.d. draw; ``duplicate`` marks traces already seen earlier in the run."""

    output: Hashable
    trace: Trace
    probability: float
    duplicate: bool


def sample_iid(
    program: RandomizedProgram,
    k: int,
    rng: np.random.Generator,
    *,
    counters: Counters | None = None,
) -> list[IidSample]:
    """Run ``program`` ``k`` times with replacement."""

    if k < 0:
        raise ValueError("k must be non-negative")
    source = RandomSource(rng, counters=counters)
    seen: set[Trace] = set()
    samples: list[IidSample] = []
    for _ in range(k):
        output = program(source)
        trace, probability = source.finish()
        samples.append(IidSample(output, trace, probability, trace in seen))
        seen.add(trace)
    return samples
