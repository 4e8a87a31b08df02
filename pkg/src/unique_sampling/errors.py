"""Exception hierarchy for unique_sampling.

Every error raised deliberately by the package derives from
:class:`SamplingError`, so callers can catch the whole family with a single
``except`` clause while still discriminating on the concrete subclass.
"""

from __future__ import annotations

from collections.abc import Sequence

__all__ = [
    "SamplingError",
    "EmptyDistribution",
    "InvalidWeight",
    "TraceMismatch",
    "Exhausted",
    "DistributionMismatch",
    "NotMidRun",
    "UnknownPath",
    "LengthMismatch",
    "EditDuringRun",
    "KTooLarge",
    "EmptySpace",
    "InvalidProbabilities",
    "MissingThreshold",
    "EmptySample",
    "DegenerateInstance",
    "InvalidTour",
    "SpaceTooLarge",
    "TooLarge",
    "ParseError",
    "ConfigurationError",
]


class SamplingError(RuntimeError):
    """Base class for all sampling-related exceptions."""


class EmptyDistribution(SamplingError, ValueError):
    """Raised when a distribution is built from zero weights."""


class InvalidWeight(SamplingError, ValueError):
    """Raised for negative, non-finite, or all-zero weights."""


class TraceMismatch(SamplingError):
    """Raised when a trace cannot be replayed against a program.

    Attributes
    ----------
    trace: tuple[int, ...]
        The trace that was being replayed.
    position: int
        Index of the choice at which replay diverged.
    """

    def __init__(self, message: str, *, trace: Sequence[int], position: int) -> None:
        super().__init__(f"{message} (trace={list(trace)!r}, position={position})")
        self.trace = tuple(trace)
        self.position = position


class Exhausted(SamplingError):
    """Raised when no more unique traces exist."""


class DistributionMismatch(SamplingError):
    """Raised when an expanded trie node is revisited with a different distribution."""


class NotMidRun(SamplingError):
    """Raised when a run is terminated without having been started."""


class UnknownPath(SamplingError, KeyError):
    """Raised when a trace prefix does not name an expanded trie node."""

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class LengthMismatch(SamplingError, ValueError):
    """Raised when replacement edge probabilities do not match the child count."""


class EditDuringRun(SamplingError):
    """Raised when edge probabilities are edited while a run or batch is in progress."""


class KTooLarge(SamplingError, ValueError):
    """Raised when more distinct items are requested than have positive probability."""


class EmptySpace(SamplingError):
    """Raised when a search space contains no terminal state."""


class InvalidProbabilities(SamplingError, ValueError):
    """Raised when sample probabilities are not a valid WOR sequence."""


class MissingThreshold(SamplingError):
    """Raised when a threshold estimator has no kappa and the space is not exhausted."""


class EmptySample(SamplingError, ValueError):
    """Raised when an estimate is requested from no samples."""


class DegenerateInstance(SamplingError, ValueError):
    """Raised for TSP instances that are too small for the heuristic."""


class InvalidTour(SamplingError, ValueError):
    """Raised when a tour is not a permutation of the instance nodes."""


class SpaceTooLarge(SamplingError):
    """Raised when an enumeration exceeds its trace budget.

    Attributes
    ----------
    limit: int
        The ``max_traces`` budget that was exceeded.
    """

    def __init__(self, limit: int) -> None:
        super().__init__(f"Trace space exceeds the enumeration limit of {limit} traces")
        self.limit = limit


class TooLarge(SamplingError):
    """Raised when an exact solver is asked for an instance beyond its size limit."""


class ParseError(SamplingError, ValueError):
    """Raised when an input file cannot be parsed."""


class ConfigurationError(SamplingError, ValueError):
    """Raised when a run configuration is invalid."""
