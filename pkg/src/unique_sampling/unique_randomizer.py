"""Incremental sampling without replacement over an augmented trie.

The :class:`UniqueRandomizer` is a :class:`~unique_sampling.choice.ChoiceSource`
that remembers every trace it has produced. Each trie node stores the
*unsampled probability mass* below it: the total probability of complete
traces that pass through the node and have not been sampled yet. Choices are
made proportionally to the children's masses, so traces that were already
returned can never be drawn again, and the next trace is distributed exactly
as the program's trace distribution conditioned on being new.

Exhaustion is tracked exactly. Every node keeps a count of children whose mass
is still positive; a node whose count drops to zero is assigned a mass of
exactly ``0.0`` instead of subtracting, so the root reaches bitwise zero once
every trace has been sampled regardless of rounding.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Hashable, Iterator, Sequence
from typing import NamedTuple, Protocol

import numpy as np

from .choice import (
    ChoiceSource,
    Distribution,
    DistributionLike,
    RandomizedProgram,
    Trace,
    resolve_distribution,
    select_proportional,
)
from .errors import DistributionMismatch, Exhausted, NotMidRun, SamplingError, UnknownPath
from .instrumentation import Counters

__all__ = [
    "TrieNode",
    "TrieSampler",
    "UniqueRandomizer",
    "UniqueSample",
    "initialize",
    "is_exhausted",
    "needs_distribution",
    "remaining_mass",
    "sample_until",
    "sample_wor",
]

logger = logging.getLogger(__name__)


class TrieNode:
    """A trace prefix together with its unsampled probability mass."""

    __slots__ = ("mass", "children", "parent", "index", "is_leaf", "live_children")

    def __init__(self, parent: TrieNode | None, mass: float, index: int = -1) -> None:
        self.mass = mass
        self.children: list[TrieNode] | None = None
        self.parent = parent
        self.index = index
        self.is_leaf = False
        self.live_children = 0

    @property
    def sampled_from(self) -> bool:
        """Whether the children of this node have been initialised."""

        return self.children is not None

    def path(self) -> Trace:
        """Return the trace prefix leading from the root to this node."""

        indices: list[int] = []
        node: TrieNode | None = self
        while node is not None and node.parent is not None:
            indices.append(node.index)
            node = node.parent
        return tuple(reversed(indices))

    def __repr__(self) -> str:  # pragma: no cover - diagnostic helper
        state = "leaf" if self.is_leaf else ("expanded" if self.children is not None else "fresh")
        return f"TrieNode(path={list(self.path())!r}, mass={self.mass!r}, {state})"


def is_exhausted(node: TrieNode) -> bool:
    """Return whether every trace below ``node`` has been sampled."""

    if node.is_leaf:
        return True
    if node.children is None:
        return False
    return node.live_children == 0


class TrieSampler(Protocol):
    """What the sampling loops need from a trie-backed choice source."""

    @property
    def exhausted(self) -> bool: ...  # pragma: no cover

    @property
    def remaining_mass(self) -> float: ...  # pragma: no cover

    def choose(self, distribution: DistributionLike | None) -> int: ...  # pragma: no cover

    def begin_run(self) -> None: ...  # pragma: no cover

    def abandon_run(self) -> None: ...  # pragma: no cover

    def process_termination(self) -> tuple[Trace, float]: ...  # pragma: no cover


class UniqueSample(NamedTuple):
    output: Hashable
    trace: Trace
    probability: float


class UniqueRandomizer(ChoiceSource):
    """Choice source that never repeats a complete trace.

    Parameters
    ----------
    rng:
        Generator used for every choice; one uniform variate is consumed per
        call to :meth:`random_choice`. Mutually exclusive with ``seed``.
    seed:
        Seed for a fresh :func:`numpy.random.default_rng` when ``rng`` is omitted.
    counters:
        Optional shared :class:`~unique_sampling.instrumentation.Counters`.
    """

    def __init__(
        self,
        rng: np.random.Generator | None = None,
        *,
        seed: int | None = None,
        counters: Counters | None = None,
    ) -> None:
        if rng is not None and seed is not None:
            raise ValueError("Pass either rng or seed, not both")
        self._rng = rng if rng is not None else np.random.default_rng(seed)
        self._counters = counters if counters is not None else Counters()
        self.root = TrieNode(None, 1.0)
        self._counters.nodes_allocated += 1
        self.cur = self.root
        self._trace: list[int] = []
        self._in_run = False
        self._processed = 0

    # ------------------------------------------------------------------
    # Introspection
    # ------------------------------------------------------------------
    @property
    def rng(self) -> np.random.Generator:
        return self._rng

    @property
    def counters(self) -> Counters:
        return self._counters

    @property
    def in_run(self) -> bool:
        return self._in_run

    @property
    def processed(self) -> int:
        """Number of traces processed so far."""

        return self._processed

    @property
    def remaining_mass(self) -> float:
        return self.root.mass

    @property
    def exhausted(self) -> bool:
        return is_exhausted(self.root)

    def needs_distribution(self) -> bool:
        """Return whether the next choice must be given a real distribution."""

        return self.cur.children is None

    def node(self, path: Sequence[int]) -> TrieNode:
        """Return the trie node for ``path``; raises :class:`UnknownPath` if absent."""

        node = self.root
        for position, index in enumerate(path):
            if node.children is None or not 0 <= index < len(node.children):
                raise UnknownPath(f"No trie node for prefix {list(path[: position + 1])!r}")
            node = node.children[index]
        return node

    def iter_nodes(self) -> Iterator[TrieNode]:
        """Yield every allocated node in depth-first order."""

        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if node.children is not None:
                stack.extend(reversed(node.children))

    # ------------------------------------------------------------------
    # Run lifecycle
    # ------------------------------------------------------------------
    def begin_run(self) -> None:
        """Start a new program run at the root."""

        if self.exhausted:
            raise Exhausted("No more unique traces exist")
        self.cur = self.root
        self._trace = []
        self._in_run = True

    def abandon_run(self) -> None:
        """Discard a partial run without touching any mass."""

        self.cur = self.root
        self._trace = []
        self._in_run = False

    def choose(self, distribution: DistributionLike | None) -> int:
        return self.random_choice(distribution)

    def random_choice(self, distribution: DistributionLike | None = None) -> int:
        """Pick the next choice index proportionally to the children's masses.

        ``distribution`` may be ``None`` (or empty) once the current node has
        been expanded; it is then ignored and the stored child masses are used.
        """

        node = self.cur
        if is_exhausted(node):
            raise Exhausted("No more unique traces exist")
        self._in_run = True

        if node.children is None:
            if distribution is None or _is_placeholder(distribution):
                raise DistributionMismatch(
                    f"Prefix {self._trace!r} has not been expanded and needs a distribution"
                )
            resolved = resolve_distribution(distribution)
            self._counters.distribution_computations += 1
            self.expand(node, resolved)
        elif distribution is not None and not callable(distribution) and not _is_placeholder(distribution):
            if len(distribution) != len(node.children):
                raise DistributionMismatch(
                    f"Prefix {self._trace!r} was expanded with {len(node.children)} outcomes, "
                    f"now presented with {len(distribution)}"
                )

        children = node.children
        assert children is not None
        index = select_proportional([child.mass for child in children], float(self._rng.random()))
        if index < 0:
            raise Exhausted("No more unique traces exist")
        self._counters.choices += 1
        self.cur = children[index]
        self._trace.append(index)
        return index

    def expand(self, node: TrieNode, distribution: Distribution) -> None:
        """Create the children of ``node`` with masses ``distribution[i] * node.mass``."""

        if node.children is not None:
            if len(node.children) != len(distribution):
                raise DistributionMismatch("Node was already expanded with a different outcome count")
            return
        node.children = [TrieNode(node, weight * node.mass, index) for index, weight in enumerate(distribution)]
        node.live_children = sum(1 for child in node.children if child.mass > 0.0)
        self._counters.add("expansions")
        self._counters.add("nodes_allocated", len(node.children))

    def process_termination(self) -> tuple[Trace, float]:
        """Record the finished run as sampled and return its trace and probability."""

        if not self._in_run:
            raise NotMidRun("process_termination called without a run in progress")
        leaf = self.cur
        if leaf.is_leaf:
            raise Exhausted(f"Trace {self._trace!r} was already sampled")
        if leaf.children is not None:
            raise DistributionMismatch(f"Program terminated at prefix {self._trace!r} that previously made a choice")

        probability = leaf.mass
        leaf.is_leaf = True
        leaf.mass = 0.0
        died = probability > 0.0
        steps = 1
        node = leaf
        while node.parent is not None:
            parent = node.parent
            if died:
                parent.live_children -= 1
            was_positive = parent.mass > 0.0
            if is_exhausted(parent):
                parent.mass = 0.0
            else:
                parent.mass = max(parent.mass - probability, 0.0)
            died = was_positive and parent.mass == 0.0
            node = parent
            steps += 1

        trace = tuple(self._trace)
        self._counters.termination_steps += steps
        self._counters.runs += 1
        self._processed += 1
        self.cur = self.root
        self._trace = []
        self._in_run = False
        if self.exhausted:
            logger.debug("Trie exhausted after %d traces", self._processed)
        return trace, probability

    def process_leaf(self, node: TrieNode) -> tuple[Trace, float]:
        """Process ``node`` as the end of a run that was not driven by :meth:`choose`."""

        if self._in_run:
            raise SamplingError("Cannot process a detached leaf while a run is in progress")
        self.cur = node
        self._trace = list(node.path())
        self._in_run = True
        return self.process_termination()

    def __repr__(self) -> str:  # pragma: no cover - diagnostic helper
        return f"UniqueRandomizer(processed={self._processed}, remaining_mass={self.root.mass!r})"


def _is_placeholder(distribution: DistributionLike) -> bool:
    if callable(distribution):
        return False
    try:
        return len(distribution) == 0  # type: ignore[arg-type]
    except TypeError:
        return False


def initialize(
    rng: np.random.Generator | None = None,
    *,
    seed: int | None = None,
    counters: Counters | None = None,
) -> UniqueRandomizer:
    """Return a fresh sampler whose root holds the whole probability mass."""

    return UniqueRandomizer(rng, seed=seed, counters=counters)


def remaining_mass(sampler: UniqueRandomizer) -> float:
    return sampler.remaining_mass


def needs_distribution(sampler: UniqueRandomizer) -> bool:
    return sampler.needs_distribution()


def sample_wor(program: RandomizedProgram, k: int, sampler: TrieSampler) -> list[UniqueSample]:
    """Draw up to ``k`` distinct traces of ``program``, continuing from ``sampler``'s state."""

    return sample_until(program, sampler, max_samples=k)


def sample_until(
    program: RandomizedProgram,
    sampler: TrieSampler,
    *,
    max_samples: int | None = None,
    target_mass: float | None = None,
    stop: Callable[[UniqueSample], bool] | None = None,
) -> list[UniqueSample]:
    """Draw distinct traces until a stopping criterion holds.

    Sampling stops when ``max_samples`` samples were drawn, when the sampled
    fraction of the probability space (``1 - remaining_mass``) reaches
    ``target_mass``, when ``stop`` returns true for the latest sample, or when
    the trie is exhausted, whichever happens first.
    """

    if max_samples is not None and max_samples < 0:
        raise ValueError("max_samples must be non-negative")
    if max_samples is None and target_mass is None and stop is None:
        raise ValueError("sample_until needs at least one stopping criterion")
    if target_mass is not None and not 0.0 <= target_mass <= 1.0:
        raise ValueError("target_mass must lie in [0, 1]")

    samples: list[UniqueSample] = []
    while max_samples is None or len(samples) < max_samples:
        if target_mass is not None and 1.0 - sampler.remaining_mass >= target_mass:
            break
        if sampler.exhausted:
            logger.debug("Stopping early: exhausted after %d of %s samples", len(samples), max_samples)
            break
        sampler.begin_run()
        try:
            output = program(sampler)
        except BaseException:
            sampler.abandon_run()
            raise
        trace, probability = sampler.process_termination()
        sample = UniqueSample(output, trace, probability)
        samples.append(sample)
        if stop is not None and stop(sample):
            break
    return samples
