"""Expectation estimators built on samples drawn without replacement.

Given samples ``s_1 .. s_k`` drawn without replacement from ``p`` and a
threshold ``kappa``, each sample is weighted by ``p(s) / q(s)`` where
``q(s) = P(Gumbel(log p(s)) > kappa)`` is its inclusion probability. The sum
of weighted values is an unbiased estimate of ``E_p[f]``; dividing by the sum
of weights gives the lower-variance normalised form.

The threshold comes either from the search itself (threshold estimator) or
from a decreasing Gumbel sequence drawn after the fact, conditioned on the
sampling order (hindsight estimator). When the samples cover the whole space
the threshold is ``-inf``, every ``q`` is 1 and all variants return the exact
expectation.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from .beam import BeamSearchResult
from .choice import TOLERANCE
from .errors import EmptySample, InvalidProbabilities, MissingThreshold
from .gumbel import gumbel_survival, sample_gumbel, sample_truncated_gumbel

__all__ = [
    "HindsightSequence",
    "WeightedSample",
    "hge_estimate",
    "hindsight_gumbels",
    "monte_carlo_estimate",
    "repeated_hge_estimate",
    "tge_estimate",
    "weighted_samples",
]

ValueFunction = Callable[[Any], float]


@dataclass(frozen=True, slots=True)
class WeightedSample:
    value: Hashable
    probability: float
    weight: float


@dataclass(frozen=True, slots=True)
class HindsightSequence:
    """Decreasing Gumbel keys ``G_1 .. G_{k+1}``; ``kappa`` is the last one."""

    gumbels: tuple[float, ...]

    @property
    def kappa(self) -> float:
        return self.gumbels[-1]


def _pairs(samples: Iterable[Any]) -> tuple[list[Hashable], list[float]]:
    values: list[Hashable] = []
    probabilities: list[float] = []
    for sample in samples:
        if hasattr(sample, "probability"):
            values.append(sample.output if hasattr(sample, "output") else sample.value)
            probabilities.append(float(sample.probability))
        else:
            value, probability = sample
            values.append(value)
            probabilities.append(float(probability))
    return values, probabilities


def _validate(probabilities: Sequence[float]) -> None:
    for probability in probabilities:
        if not math.isfinite(probability) or probability <= 0.0 or probability > 1.0 + TOLERANCE:
            raise InvalidProbabilities(f"Sample probability {probability!r} is not in (0, 1]")
    total = math.fsum(probabilities)
    if total > 1.0 + TOLERANCE:
        raise InvalidProbabilities(f"Sample probabilities sum to {total!r} > 1")


def _covers_space(probabilities: Sequence[float], remaining: float | None) -> bool:
    if remaining is not None:
        return remaining <= TOLERANCE
    return 1.0 - math.fsum(probabilities) <= TOLERANCE


def hindsight_gumbels(
    sample_probs: Sequence[float],
    rng: np.random.Generator,
    *,
    remaining: float | None = None,
) -> HindsightSequence:
    """Draw the Gumbel sequence implied by an ordered without-replacement sample.

    ``G_1 ~ Gumbel(0)`` and ``G_i`` is a Gumbel located at the log of the mass
    left before ``s_i``, truncated below ``G_{i-1}``. ``remaining`` overrides
    the mass left after the last sample, e.g. with a sampler's exact
    ``remaining_mass``; a mass of zero yields ``kappa = -inf``.
    """

    probabilities = [float(p) for p in sample_probs]
    _validate(probabilities)
    gumbels = [sample_gumbel(0.0, rng)]
    for i in range(1, len(probabilities) + 1):
        if i == len(probabilities) and remaining is not None:
            left = remaining
        else:
            left = 1.0 - math.fsum(probabilities[:i])
        if left <= TOLERANCE:
            gumbels.extend([-math.inf] * (len(probabilities) + 1 - len(gumbels)))
            break
        gumbels.append(sample_truncated_gumbel(math.log(left), gumbels[-1], rng))
    return HindsightSequence(tuple(gumbels))


def weighted_samples(samples: Iterable[Any], kappa: float) -> list[WeightedSample]:
    """Attach the importance weight ``p / q_kappa`` to each ``(value, probability)`` pair."""

    values, probabilities = _pairs(samples)
    return [
        WeightedSample(value, probability, probability / gumbel_survival(math.log(probability), kappa))
        for value, probability in zip(values, probabilities)
    ]


def _estimate(values: Sequence[Hashable], probabilities: Sequence[float], kappa: float, f: ValueFunction, normalized: bool) -> float:
    if kappa == -math.inf:
        # q = 1 for every sample, so the weights are the probabilities
        return math.fsum(p * f(value) for value, p in zip(values, probabilities))
    weights = [p / gumbel_survival(math.log(p), kappa) for p in probabilities]
    total = math.fsum(w * f(value) for value, w in zip(values, weights))
    if normalized:
        return total / math.fsum(weights)
    return total


def hge_estimate(
    samples: Sequence[Any],
    f: ValueFunction,
    rng: np.random.Generator,
    *,
    normalized: bool = False,
    remaining: float | None = None,
) -> float:
    """Hindsight estimate of ``E_p[f]`` from samples in their sampling order."""

    values, probabilities = _pairs(samples)
    if not values:
        raise EmptySample("At least one sample is needed")
    sequence = hindsight_gumbels(probabilities, rng, remaining=remaining)
    return _estimate(values, probabilities, sequence.kappa, f, normalized)


def repeated_hge_estimate(
    samples: Sequence[Any],
    f: ValueFunction,
    rng: np.random.Generator,
    *,
    normalized: bool = False,
    repeats: int = 10,
    remaining: float | None = None,
) -> float:
    """Average of ``repeats`` hindsight estimates on the same samples."""

    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    values, probabilities = _pairs(samples)
    if not values:
        raise EmptySample("At least one sample is needed")
    if _covers_space(probabilities, remaining):
        return _estimate(values, probabilities, -math.inf, f, normalized)
    estimates = [
        _estimate(values, probabilities, hindsight_gumbels(probabilities, rng, remaining=remaining).kappa, f, normalized)
        for _ in range(repeats)
    ]
    return math.fsum(estimates) / repeats


def tge_estimate(
    sbs_output: BeamSearchResult | Sequence[Any],
    f: ValueFunction,
    *,
    normalized: bool = False,
    kappa: float | None = None,
) -> float:
    """Threshold estimate using the ``kappa`` found by the beam search itself.

    Raises :class:`MissingThreshold` when a plain sample list is given
    without ``kappa``.
    """

    if isinstance(sbs_output, BeamSearchResult):
        kappa = sbs_output.kappa
        samples: Sequence[Any] = sbs_output.samples
    else:
        samples = sbs_output
    if kappa is None:
        raise MissingThreshold("No threshold available for the threshold estimator")
    values, probabilities = _pairs(samples)
    if not values:
        raise EmptySample("At least one sample is needed")
    _validate(probabilities)
    return _estimate(values, probabilities, kappa, f, normalized)


def monte_carlo_estimate(iid_samples: Sequence[Hashable], f: ValueFunction) -> float:
    """Arithmetic mean of ``f`` over i.i.d. samples."""

    if len(iid_samples) == 0:
        raise EmptySample("At least one sample is needed")
    return math.fsum(f(value) for value in iid_samples) / len(iid_samples)
