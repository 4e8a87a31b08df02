"""Trie variant that allows editing edge probabilities between runs.

Instead of absolute masses every node stores the *fraction* of its own
probability that is still unsampled, and every expanded node stores the
probabilities of its outgoing edges. The absolute unsampled mass of a node is
the product of the edge probabilities from the root times its fraction, so a
local edit only needs to recompute fractions on the path to the root.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np

from .choice import ChoiceSource, DistributionLike, Trace, make_distribution, resolve_distribution, select_proportional
from .errors import (
    DistributionMismatch,
    EditDuringRun,
    Exhausted,
    LengthMismatch,
    NotMidRun,
    UnknownPath,
)
from .instrumentation import Counters

__all__ = ["DynamicTrieNode", "DynamicUniqueRandomizer"]

logger = logging.getLogger(__name__)


class DynamicTrieNode:
    __slots__ = ("fraction", "edges", "children", "parent", "index", "is_leaf")

    def __init__(self, parent: DynamicTrieNode | None, index: int = -1) -> None:
        self.fraction = 1.0
        self.edges: tuple[float, ...] | None = None
        self.children: list[DynamicTrieNode] | None = None
        self.parent = parent
        self.index = index
        self.is_leaf = False

    def selection_weights(self) -> list[float]:
        assert self.edges is not None and self.children is not None
        return [edge * child.fraction for edge, child in zip(self.edges, self.children)]

    def recompute(self) -> None:
        """Reset ``fraction`` to the edge-weighted average of the children's fractions."""

        weights = self.selection_weights()
        if all(weight == 0.0 for weight in weights):
            self.fraction = 0.0
        else:
            self.fraction = min(max(math.fsum(weights), 0.0), 1.0)

    @property
    def exhausted(self) -> bool:
        if self.is_leaf:
            return True
        if self.children is None:
            return False
        return all(weight == 0.0 for weight in self.selection_weights())


class DynamicUniqueRandomizer(ChoiceSource):
    """Sampling without replacement that tolerates edits to the factorized distribution.

    With no edits it draws exactly the same traces as
    :class:`~unique_sampling.unique_randomizer.UniqueRandomizer` for the same
    generator, because both consume one uniform variate per choice and select
    proportionally to weights that differ only by a constant factor.
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
        self.root = DynamicTrieNode(None)
        self._counters.nodes_allocated += 1
        self.cur = self.root
        self._trace: list[int] = []
        self._in_run = False

    @property
    def counters(self) -> Counters:
        return self._counters

    @property
    def in_run(self) -> bool:
        return self._in_run

    @property
    def exhausted(self) -> bool:
        return self.root.exhausted

    @property
    def remaining_mass(self) -> float:
        return self.root.fraction

    def needs_distribution(self) -> bool:
        return self.cur.children is None

    def node(self, path: Sequence[int]) -> DynamicTrieNode:
        node = self.root
        for position, index in enumerate(path):
            if node.children is None or not 0 <= index < len(node.children):
                raise UnknownPath(f"No trie node for prefix {list(path[: position + 1])!r}")
            node = node.children[index]
        return node

    def effective_mass(self, path: Sequence[int]) -> float:
        """Return the absolute unsampled probability mass of the node at ``path``."""

        node = self.root
        mass = 1.0
        for position, index in enumerate(path):
            if node.children is None or not 0 <= index < len(node.children):
                raise UnknownPath(f"No trie node for prefix {list(path[: position + 1])!r}")
            assert node.edges is not None
            mass *= node.edges[index]
            node = node.children[index]
        return mass * node.fraction

    def update_edge_probabilities(self, path: Sequence[int], new_probabilities: DistributionLike) -> None:
        """Replace the outgoing edge probabilities of an expanded node.

        Only allowed between runs. The new vector is normalised first; the
        node's fraction and those of all its ancestors are then recomputed
        bottom-up so later runs follow the edited distribution restricted to
        traces that were not sampled yet.
        """

        if self._in_run:
            raise EditDuringRun("Edge probabilities can only be edited between runs")
        node = self.node(path)
        if node.children is None:
            raise UnknownPath(f"Prefix {list(path)!r} has not been expanded")
        distribution = make_distribution(resolve_distribution(new_probabilities))
        if len(distribution) != len(node.children):
            raise LengthMismatch(
                f"Node at {list(path)!r} has {len(node.children)} children, got {len(distribution)} probabilities"
            )
        node.edges = distribution.weights
        current: DynamicTrieNode | None = node
        while current is not None:
            if not current.is_leaf:
                current.recompute()
            current = current.parent
        logger.debug("Edited edges at %s; root fraction now %r", list(path), self.root.fraction)

    def begin_run(self) -> None:
        if self.exhausted:
            raise Exhausted("No more unique traces exist")
        self.cur = self.root
        self._trace = []
        self._in_run = True

    def abandon_run(self) -> None:
        self.cur = self.root
        self._trace = []
        self._in_run = False

    def choose(self, distribution: DistributionLike | None) -> int:
        return self.random_choice(distribution)

    def random_choice(self, distribution: DistributionLike | None = None) -> int:
        node = self.cur
        if node.exhausted:
            raise Exhausted("No more unique traces exist")
        self._in_run = True
        if node.children is None:
            if distribution is None:
                raise DistributionMismatch(f"Prefix {self._trace!r} has not been expanded and needs a distribution")
            resolved = resolve_distribution(distribution)
            self._counters.distribution_computations += 1
            node.edges = resolved.weights
            node.children = [DynamicTrieNode(node, index) for index in range(len(resolved))]
            self._counters.expansions += 1
            self._counters.nodes_allocated += len(node.children)
        elif distribution is not None and not callable(distribution) and len(distribution) not in (0, len(node.children)):
            raise DistributionMismatch(
                f"Prefix {self._trace!r} was expanded with {len(node.children)} outcomes, "
                f"now presented with {len(distribution)}"
            )

        index = select_proportional(node.selection_weights(), float(self._rng.random()))
        if index < 0:
            raise Exhausted("No more unique traces exist")
        self._counters.choices += 1
        self.cur = node.children[index]
        self._trace.append(index)
        return index

    def process_termination(self) -> tuple[Trace, float]:
        """Mark the current leaf sampled and return its trace and current effective mass."""

        if not self._in_run:
            raise NotMidRun("process_termination called without a run in progress")
        leaf = self.cur
        if leaf.is_leaf:
            raise Exhausted(f"Trace {self._trace!r} was already sampled")
        if leaf.children is not None:
            raise DistributionMismatch(f"Program terminated at prefix {self._trace!r} that previously made a choice")

        trace = tuple(self._trace)
        probability = self.effective_mass(trace)
        leaf.is_leaf = True
        leaf.fraction = 0.0
        steps = 1
        node = leaf.parent
        while node is not None:
            node.recompute()
            node = node.parent
            steps += 1

        self._counters.termination_steps += steps
        self._counters.runs += 1
        self.cur = self.root
        self._trace = []
        self._in_run = False
        return trace, probability
