"""Choice source that runs a program up to a prefix and reports what comes next."""

from __future__ import annotations

from collections.abc import Hashable, Sequence
from dataclasses import dataclass

from unique_sampling.choice import ChoiceSource, DistributionLike, RandomizedProgram, Trace
from unique_sampling.errors import TraceMismatch

__all__ = ["ProbeResult", "ProbeSource", "probe"]


class _PrefixReached(Exception):
    def __init__(self, distribution: DistributionLike | None) -> None:
        super().__init__("prefix reached")
        self.distribution = distribution


class ProbeSource(ChoiceSource):
    """Replay ``prefix`` and stop the program at the first choice after it.

    The distribution passed to the stopping choice is captured as given: a
    lazy distribution is *not* evaluated, so probing is free of probability
    computations until the caller decides it needs them.
    """

    __slots__ = ("_prefix", "_position")

    def __init__(self, prefix: Sequence[int]) -> None:
        self._prefix = tuple(prefix)
        self._position = 0

    @property
    def consumed(self) -> int:
        return self._position

    def needs_distribution(self) -> bool:
        return self._position >= len(self._prefix)

    def choose(self, distribution: DistributionLike | None) -> int:
        if self._position >= len(self._prefix):
            raise _PrefixReached(distribution)
        index = self._prefix[self._position]
        self._position += 1
        return index


@dataclass(frozen=True, slots=True)
class ProbeResult:
    """Outcome of running a program to a prefix.

    Exactly one of ``output`` (when ``terminal``) and ``distribution`` is set.
    """

    terminal: bool
    output: Hashable = None
    distribution: DistributionLike | None = None


def probe(program: RandomizedProgram, prefix: Trace) -> ProbeResult:
    """Run ``program`` along ``prefix`` and report whether it ends there."""

    source = ProbeSource(prefix)
    try:
        output = program(source)
    except _PrefixReached as reached:
        return ProbeResult(terminal=False, distribution=reached.distribution)
    if source.consumed != len(prefix):
        raise TraceMismatch(
            "Program terminated before consuming the whole prefix",
            trace=prefix,
            position=source.consumed,
        )
    return ProbeResult(terminal=True, output=output)
