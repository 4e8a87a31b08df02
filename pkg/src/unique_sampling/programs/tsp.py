"""Euclidean TSP instances and a temperature-relaxed farthest-insertion heuristic.

The heuristic starts from a three-node cycle and repeatedly inserts the node
farthest from the cycle. Where it goes is the only random choice: position
``i`` is picked with probability proportional to ``delta_i ** (-1 / tau)``,
``delta_i`` being the cost increase of inserting there. ``tau = 0`` is the
classical greedy heuristic and makes no choices at all; ``tau = inf`` picks
positions uniformly.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

from unique_sampling.choice import ChoiceSource, Distribution, RandomizedProgram, make_distribution
from unique_sampling.errors import DegenerateInstance, InvalidTour, ParseError

__all__ = [
    "DELTA_FLOOR",
    "Tour",
    "TspInstance",
    "default_temperature",
    "farthest_insertion",
    "greedy_tour",
    "initial_cycle",
    "insertion_program",
    "read_instance",
    "tour_cost",
    "write_instance",
]

logger = logging.getLogger(__name__)

DELTA_FLOOR = 1e-12
"""Insertion costs are floored here before taking ``log``."""


@dataclass(frozen=True, eq=False)
class TspInstance:
    """Points in the unit square with their Euclidean distance matrix."""

    points: np.ndarray
    distances: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise ValueError("points must be an (n, 2) array")
        if not np.all(np.isfinite(points)):
            raise ValueError("points must be finite")
        points.setflags(write=False)
        distances = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=-1))
        distances.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "distances", distances)

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> TspInstance:
        """Draw ``n`` points uniformly from the unit square."""

        return cls(rng.random((n, 2)))


@dataclass(frozen=True, slots=True)
class Tour:
    """A closed tour; equality and hashing only look at the node order."""

    order: tuple[int, ...]
    cost: float = field(compare=False)

    def canonical(self) -> tuple[int, ...]:
        """Rotate to start at node 0 and fix the direction, so equivalent cycles compare equal."""

        start = self.order.index(0)
        rotated = self.order[start:] + self.order[:start]
        reverse = (rotated[0],) + tuple(reversed(rotated[1:]))
        return min(rotated, reverse)


def tour_cost(instance: TspInstance, tour: Sequence[int] | Tour) -> float:
    order = tour.order if isinstance(tour, Tour) else tuple(int(node) for node in tour)
    if sorted(order) != list(range(instance.n)):
        raise InvalidTour(f"Tour {list(order)!r} does not visit each of the {instance.n} nodes exactly once")
    d = instance.distances
    return math.fsum(float(d[order[i], order[(i + 1) % len(order)]]) for i in range(len(order)))


def default_temperature(n: int) -> float:
    if n <= 20:
        return 0.3
    if n <= 50:
        return 0.2
    return 0.15


def initial_cycle(instance: TspInstance) -> list[int]:
    """The two mutually farthest nodes plus the node farthest from that pair."""

    if instance.n < 3:
        raise DegenerateInstance(f"Need at least 3 nodes, got {instance.n}")
    d = instance.distances
    if not np.any(d > 0.0):
        return [0, 1, 2]
    first, second = np.unravel_index(int(np.argmax(d)), d.shape)
    first, second = sorted((int(first), int(second)))
    gap = np.minimum(d[first], d[second]).copy()
    gap[[first, second]] = -np.inf
    third = int(np.argmax(gap))
    return [first, second, third]


def _insertion_deltas(distances: np.ndarray, cycle: list[int], node: int) -> np.ndarray:
    here = np.asarray(cycle)
    after = np.roll(here, -1)
    return distances[here, node] + distances[node, after] - distances[here, after]


def _insertion_distribution(deltas: np.ndarray, temperature: float) -> Distribution:
    if math.isinf(temperature):
        return make_distribution(np.ones(len(deltas)))
    logits = -np.log(np.maximum(deltas, DELTA_FLOOR)) / temperature
    return make_distribution(np.exp(logits - logsumexp(logits)))


def farthest_insertion(instance: TspInstance, temperature: float, choice: ChoiceSource) -> Tour:
    """Build a tour, sampling each insertion position through ``choice``.

    The farthest remaining node is chosen deterministically (lowest index on
    ties). With ``temperature == 0`` the cheapest position is used and
    ``choice`` is never called.
    """

    if temperature < 0.0 or math.isnan(temperature):
        raise ValueError("temperature must be non-negative")
    d = instance.distances
    cycle = initial_cycle(instance)
    remaining = np.ones(instance.n, dtype=bool)
    remaining[cycle] = False
    gap = d[cycle].min(axis=0)
    while remaining.any():
        candidates = np.where(remaining, gap, -np.inf)
        node = int(np.argmax(candidates))
        deltas = _insertion_deltas(d, cycle, node)
        if temperature == 0.0:
            position = int(np.argmin(deltas))
        else:
            position = choice.choose(partial(_insertion_distribution, deltas, temperature))
        cycle.insert(position + 1, node)
        remaining[node] = False
        gap = np.minimum(gap, d[node])
    order = tuple(cycle)
    return Tour(order, tour_cost(instance, order))


def insertion_program(instance: TspInstance, temperature: float) -> RandomizedProgram:
    return partial(farthest_insertion, instance, temperature)


def greedy_tour(instance: TspInstance) -> Tour:
    """The classical farthest-insertion tour."""

    return farthest_insertion(instance, 0.0, _NoChoices())


class _NoChoices(ChoiceSource):
    def choose(self, distribution):  # pragma: no cover - greedy never chooses
        raise AssertionError("greedy insertion makes no random choices")


def read_instance(path: str | Path) -> TspInstance:
    """Parse ``n`` followed by ``n`` lines of two coordinates in [0, 1]."""

    try:
        lines = [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines() if line.strip()]
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"Cannot read instance file {path}: {exc}") from exc
    if not lines:
        raise ParseError(f"Instance file {path} is empty")
    try:
        n = int(lines[0])
        rows = [tuple(float(value) for value in line.split()) for line in lines[1:]]
    except ValueError as exc:
        raise ParseError(f"Malformed instance file {path}: {exc}") from exc
    if len(rows) != n or any(len(row) != 2 for row in rows):
        raise ParseError(f"Instance file {path} must list {n} lines of two coordinates")
    points = np.asarray(rows, dtype=float).reshape(n, 2)
    if np.any(points < 0.0) or np.any(points > 1.0):
        raise ParseError(f"Coordinates in {path} must lie in [0, 1]")
    return TspInstance(points)


def write_instance(instance: TspInstance, path: str | Path) -> None:
    lines = [str(instance.n)] + [f"{x!r} {y!r}" for x, y in instance.points.tolist()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
