"""Core abstractions for discrete randomized programs.

A randomized program is an ordinary Python callable that receives a
:class:`ChoiceSource` and returns a hashable output. All of its randomness
flows through ``choice.choose(distribution)``, which returns an index into the
supplied distribution. The sequence of indices returned during one execution
is the program's *trace*; the product of the chosen probabilities is the
trace probability.

Distributions may be passed eagerly, or lazily as a zero-argument callable.
Trie-backed sources only call the thunk when the current node has never been
expanded, which lets programs skip probability computations on revisits.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Hashable, Iterator, Sequence
from dataclasses import dataclass
from typing import Protocol, TypeAlias, runtime_checkable

import numpy as np

from .errors import EmptyDistribution, InvalidWeight, TraceMismatch

__all__ = [
    "TOLERANCE",
    "Distribution",
    "DistributionLike",
    "Trace",
    "ChoiceSource",
    "RandomizedProgram",
    "make_distribution",
    "resolve_distribution",
    "select_proportional",
    "trace_probability",
    "run_with_replay",
]

TOLERANCE = 1e-9
"""Absolute tolerance for "sums to one" checks throughout the package."""

# Inputs whose sum lies this close to one are treated as already normalised,
# which makes make_distribution exactly idempotent.
_RENORMALISE_SLACK = 1e-12

Trace: TypeAlias = tuple[int, ...]


@dataclass(frozen=True, slots=True)
class Distribution:
    """Immutable finite probability vector for one random choice."""

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.weights:
            raise EmptyDistribution("A distribution needs at least one outcome")
        for weight in self.weights:
            if not math.isfinite(weight) or weight < 0.0:
                raise InvalidWeight(f"Invalid probability {weight!r}")
        total = math.fsum(self.weights)
        if abs(total - 1.0) > TOLERANCE:
            raise InvalidWeight(f"Probabilities must sum to 1, got {total!r}")

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, index: int) -> float:
        return self.weights[index]

    def __iter__(self) -> Iterator[float]:
        return iter(self.weights)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def log_weights(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.as_array())


DistributionLike: TypeAlias = (
    Distribution | Sequence[float] | np.ndarray | Callable[[], "Distribution | Sequence[float] | np.ndarray"]
)


@runtime_checkable
class ChoiceSource(Protocol):
    """Provider of the random choice operation used by randomized programs."""

    def choose(self, distribution: DistributionLike | None) -> int:  # pragma: no cover - protocol definition
        ...


RandomizedProgram: TypeAlias = Callable[[ChoiceSource], Hashable]


def make_distribution(raw_weights: Sequence[float] | np.ndarray | Distribution) -> Distribution:
    """Normalise non-negative weights into a :class:`Distribution`.

    Raises
    ------
    EmptyDistribution
        If ``raw_weights`` is empty.
    InvalidWeight
        If any weight is negative or non-finite, or all weights are zero.
    """

    if isinstance(raw_weights, Distribution):
        return raw_weights

    values = [float(weight) for weight in np.asarray(raw_weights, dtype=float).ravel()]
    if not values:
        raise EmptyDistribution("A distribution needs at least one outcome")
    for weight in values:
        if not math.isfinite(weight) or weight < 0.0:
            raise InvalidWeight(f"Invalid weight {weight!r}")

    total = math.fsum(values)
    if total <= 0.0:
        raise InvalidWeight("At least one weight must be positive")
    if abs(total - 1.0) <= _RENORMALISE_SLACK:
        return Distribution(tuple(values))
    return Distribution(tuple(weight / total for weight in values))


def resolve_distribution(distribution: DistributionLike) -> Distribution:
    """Materialise a possibly lazy distribution argument."""

    if callable(distribution) and not isinstance(distribution, Distribution):
        distribution = distribution()
    return make_distribution(distribution)


def select_proportional(weights: Sequence[float], u: float) -> int:
    """Pick an index with probability proportional to ``weights`` using one uniform ``u``.

    The scan is linear over the weights; the last positive entry absorbs any
    rounding residue so the result is always a positive-weight index. Returns
    ``-1`` when no weight is positive.
    """

    total = math.fsum(weights)
    if total <= 0.0:
        return -1
    threshold = u * total
    cumulative = 0.0
    last_positive = -1
    for index, weight in enumerate(weights):
        if weight <= 0.0:
            continue
        last_positive = index
        cumulative += weight
        if threshold < cumulative:
            return index
    return last_positive


def run_with_replay(program: RandomizedProgram, trace: Sequence[int], *, strict: bool = True) -> tuple[Hashable, int]:
    """Re-execute ``program`` with the choices in ``trace``.

    Returns the program output and the number of trace entries consumed. With
    ``strict`` (the default) a trace that is longer than the execution raises
    :class:`TraceMismatch` instead of returning a short consumed length.
    """

    from .adapters.replay import ReplaySource

    source = ReplaySource(trace)
    output = program(source)
    if strict and source.consumed != len(source.trace):
        raise TraceMismatch(
            "Program terminated before consuming the whole trace",
            trace=source.trace,
            position=source.consumed,
        )
    return output, source.consumed


def trace_probability(program: RandomizedProgram, trace: Sequence[int]) -> float:
    """Return the product of the probabilities chosen along ``trace``."""

    from .adapters.replay import ReplaySource

    source = ReplaySource(trace)
    program(source)
    if source.consumed != len(source.trace):
        raise TraceMismatch(
            "Program terminated before consuming the whole trace",
            trace=source.trace,
            position=source.consumed,
        )
    return source.probability
