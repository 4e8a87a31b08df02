"""Choice source that replays a fixed trace."""

from __future__ import annotations

from collections.abc import Sequence

from unique_sampling.choice import ChoiceSource, DistributionLike, resolve_distribution
from unique_sampling.errors import TraceMismatch

__all__ = ["ReplaySource"]


class ReplaySource(ChoiceSource):
    """Feed a recorded trace back into a randomized program.

    The source also accumulates the probability of the replayed choices so
    that a single execution yields both the output and ``P(trace)``.
    """

    __slots__ = ("_trace", "_consumed", "_probability")

    def __init__(self, trace: Sequence[int]) -> None:
        self._trace = tuple(int(index) for index in trace)
        self._consumed = 0
        self._probability = 1.0

    @property
    def trace(self) -> tuple[int, ...]:
        return self._trace

    @property
    def consumed(self) -> int:
        """Number of trace entries handed to the program so far."""

        return self._consumed

    @property
    def probability(self) -> float:
        """Product of the probabilities of the replayed choices."""

        return self._probability

    def choose(self, distribution: DistributionLike | None) -> int:
        position = self._consumed
        if position >= len(self._trace):
            raise TraceMismatch(
                "Program requested more choices than the trace provides",
                trace=self._trace,
                position=position,
            )
        if distribution is None:
            raise TraceMismatch(
                "Replay needs the distribution of every choice",
                trace=self._trace,
                position=position,
            )
        resolved = resolve_distribution(distribution)
        index = self._trace[position]
        if not 0 <= index < len(resolved):
            raise TraceMismatch(
                f"Choice index {index} is out of range for a distribution of length {len(resolved)}",
                trace=self._trace,
                position=position,
            )
        self._probability *= resolved[index]
        self._consumed = position + 1
        return index
