"""Gumbel perturbations in natural-log space.

Zero probabilities are represented by a location of ``-inf`` and always map
to a key of ``-inf``. Uniform variates are drawn from the supplied
:class:`numpy.random.Generator` and clamped away from zero so every inverse
CDF evaluation stays finite.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from .errors import KTooLarge

__all__ = [
    "EXPONENT_GUARD",
    "gumbel_from_uniform",
    "gumbel_survival",
    "gumbel_top_k",
    "log1mexp",
    "sample_gumbel",
    "sample_truncated_gumbel",
    "shifted_gumbels",
]

EXPONENT_GUARD = 700.0
"""Largest exponent evaluated directly; beyond it the limiting value is used."""

_TINY = np.finfo(float).tiny


def _uniform(rng: np.random.Generator) -> float:
    return max(float(rng.random()), _TINY)


def gumbel_from_uniform(location: float, u: float) -> float:
    """Inverse CDF of ``Gumbel(location)`` evaluated at ``u`` in (0, 1)."""

    if location == -math.inf:
        return -math.inf
    return location - math.log(-math.log(u))


def sample_gumbel(location: float, rng: np.random.Generator) -> float:
    return gumbel_from_uniform(location, _uniform(rng))


def sample_truncated_gumbel(location: float, bound: float, rng: np.random.Generator) -> float:
    """Draw ``Gumbel(location)`` conditioned on being below ``bound``.

    Uses ``location - logaddexp(location - bound, log E)`` with ``E`` a unit
    exponential variate, which stays finite for any gap between the location
    and the bound.
    """

    if location == -math.inf:
        return -math.inf
    exponential = -math.log(_uniform(rng))
    return location - float(np.logaddexp(location - bound, math.log(exponential)))


def log1mexp(x: np.ndarray | float) -> np.ndarray:
    """Compute ``log(1 - exp(x))`` for ``x <= 0`` without cancellation."""

    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > -math.log(2.0), np.log(-np.expm1(x)), np.log1p(-np.exp(x)))


def shifted_gumbels(log_probs: Sequence[float] | np.ndarray, bound: float, rng: np.random.Generator) -> np.ndarray:
    """Perturb ``log_probs`` with Gumbels conditioned on their maximum being ``bound``.

    This is how beam children inherit their parent's key: the largest child
    key equals ``bound`` exactly and every other key lies below it.
    Entries equal to ``-inf`` stay ``-inf``.
    """

    phi = np.asarray(log_probs, dtype=float)
    keys = np.full(phi.shape, -math.inf)
    finite = np.isfinite(phi)
    if not finite.any():
        return keys
    uniforms = np.maximum(rng.random(int(finite.sum())), _TINY)
    perturbed = phi[finite] - np.log(-np.log(uniforms))
    maximum = perturbed.max()
    with np.errstate(divide="ignore", invalid="ignore"):
        v = bound - perturbed + log1mexp(perturbed - maximum)
        shifted = bound - np.maximum(0.0, v) - np.log1p(np.exp(-np.abs(v)))
    keys[finite] = shifted
    return keys


def gumbel_top_k(
    log_probs: Sequence[float] | np.ndarray,
    k: int,
    rng: np.random.Generator,
) -> list[tuple[int, float]]:
    """Return the ``k`` indices with the largest perturbed log-probabilities.

    The result is sorted by key, largest first; equal keys keep the lower
    index first. Raises :class:`KTooLarge` if fewer than ``k`` entries have a
    positive probability.
    """

    phi = np.asarray(log_probs, dtype=float)
    available = int(np.isfinite(phi).sum())
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > available:
        raise KTooLarge(f"Cannot select {k} items from {available} with positive probability")
    keys = [
        (index, sample_gumbel(float(location), rng) if math.isfinite(location) else -math.inf)
        for index, location in enumerate(phi)
    ]
    keys.sort(key=lambda item: (-item[1], item[0]))
    return keys[:k]


def gumbel_survival(location: float, kappa: float) -> float:
    """Return ``P(Gumbel(location) > kappa)``, the inclusion probability ``q_kappa``."""

    if kappa == -math.inf:
        return 1.0
    if location == -math.inf or kappa == math.inf:
        return 0.0
    x = location - kappa
    if x > EXPONENT_GUARD:
        return 1.0
    return -math.expm1(-math.exp(x))
