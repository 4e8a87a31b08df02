"""Stochastic Beam Search and incremental batched sampling over the trie.

:func:`stochastic_beam_search` draws ``k`` distinct traces in one pass: every
state carries a Gumbel key, children inherit keys conditioned on their
parent's key, and only the ``k`` best keys survive each level.

:func:`sample_batch_wor` runs the same search over a
:class:`~unique_sampling.unique_randomizer.UniqueRandomizer` trie, using the
trie's *unsampled* masses as probabilities. Every batch is therefore sampled
without replacement with respect to all earlier batches and incremental runs.

Randomness is reproducible under parallel expansion: one base seed is drawn
from the caller's generator and each state's children are keyed from their
own stream derived from ``(base_seed, len(prefix), *prefix)``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Hashable, Iterable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Protocol, TypeVar, runtime_checkable

import numpy as np

from .adapters.probe import probe
from .choice import RandomizedProgram, Trace, resolve_distribution
from .errors import DistributionMismatch, EmptySpace, Exhausted
from .gumbel import sample_gumbel, shifted_gumbels
from .instrumentation import Counters, expansion_counter
from .unique_randomizer import TrieNode, UniqueRandomizer

__all__ = [
    "BeamSample",
    "BeamSearchResult",
    "BeamState",
    "Expander",
    "Expansion",
    "ProgramExpander",
    "expansion_counter",
    "sample_batch_wor",
    "sample_batches",
    "stochastic_beam_search",
]

logger = logging.getLogger(__name__)

_T = TypeVar("_T")


@dataclass(slots=True)
class BeamState:
    """One search state: a trace prefix and its Gumbel key."""

    prefix: Trace
    log_prob: float
    gumbel: float
    terminal: bool = False
    context: Any = None
    output: Hashable = None

    def sort_key(self) -> tuple[float, Trace]:
        return (-self.gumbel, self.prefix)


class Expansion(NamedTuple):
    """A child produced by :meth:`Expander.expand`.

    ``log_prob`` is the log-probability *increment* of the edge. Terminal
    children carry the program output.
    """

    index: int
    log_prob: float
    context: Any = None
    terminal: bool = False
    output: Hashable = None


@runtime_checkable
class Expander(Protocol):
    """Next-state function enumerating the children of a search state."""

    def initial_context(self) -> Any:  # pragma: no cover - protocol definition
        ...

    def expand(self, state: BeamState) -> Sequence[Expansion]:  # pragma: no cover - protocol definition
        ...


class BeamSample(NamedTuple):
    output: Hashable
    trace: Trace
    probability: float
    gumbel: float


@dataclass(slots=True)
class BeamSearchResult:
    """Samples sorted by Gumbel key together with the search threshold.

    ``kappa`` is the largest key among pruned states, i.e. the ``(k+1)``-th
    largest key over all complete traces. When nothing was pruned the search
    returned every trace with positive probability; ``exhausted`` is then set
    and ``kappa`` is ``-inf``.
    """

    samples: list[BeamSample]
    kappa: float
    expansions: int
    exhausted: bool = False
    counters: Counters = field(default_factory=Counters, repr=False)

    def __iter__(self) -> Iterator[BeamSample]:
        return iter(self.samples)

    def __len__(self) -> int:
        return len(self.samples)


def _stream(base_seed: int, prefix: Trace) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([base_seed, len(prefix), *prefix]))


def _map(function: Callable[[BeamState], _T], states: Sequence[BeamState], executor: ThreadPoolExecutor | None) -> list[_T]:
    if executor is None or len(states) < 2:
        return [function(state) for state in states]
    return list(executor.map(function, states))


def _select(candidates: Iterable[BeamState], k: int) -> tuple[list[BeamState], float | None]:
    """Keep the ``k`` best-keyed candidates and return them with the best pruned key."""

    ordered = sorted((state for state in candidates if state.gumbel > -math.inf), key=BeamState.sort_key)
    pruned = ordered[k:]
    return ordered[:k], (pruned[0].gumbel if pruned else None)


def _merge_kappa(current: float | None, new: float | None) -> float | None:
    if new is None:
        return current
    if current is None:
        return new
    return max(current, new)


def _run_search(
    root: BeamState,
    k: int,
    expand_state: Callable[[BeamState], list[BeamState]],
    *,
    max_workers: int | None,
) -> tuple[list[BeamState], float | None]:
    beam = [root]
    kappa: float | None = None
    executor = ThreadPoolExecutor(max_workers=max_workers) if max_workers and max_workers > 1 else None
    try:
        depth = 0
        while any(not state.terminal for state in beam):
            pending = [state for state in beam if not state.terminal]
            finished = [state for state in beam if state.terminal]
            children = _map(expand_state, pending, executor)
            candidates = finished + [child for group in children for child in group]
            beam, pruned_key = _select(candidates, k)
            kappa = _merge_kappa(kappa, pruned_key)
            depth += 1
            logger.debug("Beam depth %d: %d candidates, kept %d", depth, len(candidates), len(beam))
    finally:
        if executor is not None:
            executor.shutdown(wait=True)
    return beam, kappa


def stochastic_beam_search(
    expander: Expander,
    k: int,
    rng: np.random.Generator,
    *,
    max_workers: int | None = None,
    counters: Counters | None = None,
) -> BeamSearchResult:
    """Sample up to ``k`` distinct complete traces from ``expander`` without replacement.

    Parameters
    ----------
    expander:
        Next-state function; the root state has an empty prefix and
        ``expander.initial_context()`` as context.
    k:
        Beam width, at least 1.
    rng:
        Source of the base seed and the root key.
    max_workers:
        Expand the states of one depth level on this many threads.
    counters:
        Receives one expansion and one distribution computation per
        ``expand`` call.

    Raises
    ------
    EmptySpace
        If the expander produces no complete trace with positive probability.
    """

    if k < 1:
        raise ValueError("k must be at least 1")
    counters = counters if counters is not None else Counters()
    start = counters.expansions
    base_seed = int(rng.integers(0, 2**63))
    root = BeamState(prefix=(), log_prob=0.0, gumbel=sample_gumbel(0.0, rng), context=expander.initial_context())

    def expand_state(state: BeamState) -> list[BeamState]:
        expansions = list(expander.expand(state))
        counters.add("expansions")
        counters.add("distribution_computations")
        counters.add("nodes_allocated", len(expansions))
        log_probs = [state.log_prob + child.log_prob for child in expansions]
        keys = shifted_gumbels(log_probs, state.gumbel, _stream(base_seed, state.prefix))
        return [
            BeamState(
                prefix=(*state.prefix, child.index),
                log_prob=log_prob,
                gumbel=float(key),
                terminal=child.terminal,
                context=child.context,
                output=child.output,
            )
            for child, log_prob, key in zip(expansions, log_probs, keys)
        ]

    beam, kappa = _run_search(root, k, expand_state, max_workers=max_workers)
    if not beam:
        raise EmptySpace("The search space has no complete trace with positive probability")
    samples = [BeamSample(state.output, state.prefix, math.exp(state.log_prob), state.gumbel) for state in beam]
    return BeamSearchResult(
        samples=samples,
        kappa=-math.inf if kappa is None else kappa,
        expansions=counters.expansions - start,
        exhausted=kappa is None,
        counters=counters,
    )


class ProgramExpander:
    """Expose a randomized program's trace tree as an :class:`Expander`.

    Expanding a state replays the program up to the state's prefix and reads
    the next distribution; each child prefix is probed to find out whether
    the program terminates there. Probing does not evaluate lazy
    distributions, so only one distribution is computed per expansion.
    """

    def __init__(self, program: RandomizedProgram) -> None:
        self.program = program

    def initial_context(self) -> None:
        return None

    def expand(self, state: BeamState) -> list[Expansion]:
        result = probe(self.program, state.prefix)
        if result.terminal:
            raise DistributionMismatch(f"Prefix {list(state.prefix)!r} is a complete trace and cannot be expanded")
        distribution = resolve_distribution(result.distribution) if result.distribution is not None else None
        if distribution is None:
            raise DistributionMismatch(f"Program gave no distribution after prefix {list(state.prefix)!r}")
        children: list[Expansion] = []
        for index, weight in enumerate(distribution):
            log_prob = math.log(weight) if weight > 0.0 else -math.inf
            if weight > 0.0:
                child = probe(self.program, (*state.prefix, index))
                children.append(Expansion(index, log_prob, None, child.terminal, child.output))
            else:
                children.append(Expansion(index, log_prob))
        return children


def sample_batch_wor(
    sampler: UniqueRandomizer,
    program: RandomizedProgram,
    batch_size: int,
    rng: np.random.Generator,
    *,
    max_workers: int | None = None,
) -> list[BeamSample]:
    """Draw the next batch of distinct traces from ``sampler``'s residual distribution.

    Trie nodes act as beam states with log-probability ``log(node.mass)``.
    Unexpanded nodes are expanded on demand by replaying ``program`` to the
    node's prefix; a node where the program returns is a complete trace.
    After the search the returned leaves are processed in key order exactly
    as :meth:`~unique_sampling.unique_randomizer.UniqueRandomizer.process_termination`
    would, so later batches and incremental runs never repeat them.
    """

    if batch_size < 1:
        raise ValueError("batch_size must be at least 1")
    if sampler.in_run:
        raise DistributionMismatch("Cannot draw a batch while an incremental run is in progress")
    if sampler.exhausted:
        raise Exhausted("No more unique traces exist")

    counters = sampler.counters
    base_seed = int(rng.integers(0, 2**63))
    nodes: dict[Trace, TrieNode] = {(): sampler.root}
    log_mass = math.log(sampler.root.mass)
    root = BeamState(prefix=(), log_prob=log_mass, gumbel=sample_gumbel(log_mass, rng))

    def expand_state(state: BeamState) -> list[BeamState]:
        node = nodes[state.prefix]
        if node.children is None:
            result = probe(program, state.prefix)
            if result.terminal:
                return [
                    BeamState(state.prefix, state.log_prob, state.gumbel, terminal=True, output=result.output)
                ]
            if result.distribution is None:
                raise DistributionMismatch(
                    f"Prefix {list(state.prefix)!r} has not been expanded and needs a distribution"
                )
            distribution = resolve_distribution(result.distribution)
            counters.add("distribution_computations")
            sampler.expand(node, distribution)
        children = node.children
        assert children is not None
        with np.errstate(divide="ignore"):
            log_masses = np.log(np.array([child.mass for child in children], dtype=float))
        keys = shifted_gumbels(log_masses, state.gumbel, _stream(base_seed, state.prefix))
        states = []
        for index, child in enumerate(children):
            if child.mass <= 0.0:
                continue
            prefix = (*state.prefix, index)
            nodes[prefix] = child
            states.append(BeamState(prefix, float(log_masses[index]), float(keys[index])))
        return states

    beam, _ = _run_search(root, batch_size, expand_state, max_workers=max_workers)

    samples: list[BeamSample] = []
    for state in beam:
        trace, probability = sampler.process_leaf(nodes[state.prefix])
        samples.append(BeamSample(state.output, trace, probability, state.gumbel))
    logger.debug("Batch of %d drawn; remaining mass %r", len(samples), sampler.remaining_mass)
    return samples


def sample_batches(
    program: RandomizedProgram,
    sampler: UniqueRandomizer,
    k: int,
    batch_size: int,
    rng: np.random.Generator,
    *,
    max_workers: int | None = None,
) -> list[BeamSample]:
    """Draw up to ``k`` distinct traces in batches of at most ``batch_size``."""

    if k < 0:
        raise ValueError("k must be non-negative")
    samples: list[BeamSample] = []
    while len(samples) < k and not sampler.exhausted:
        size = min(batch_size, k - len(samples))
        samples.extend(sample_batch_wor(sampler, program, size, rng, max_workers=max_workers))
    if len(samples) < k:
        logger.debug("Stopping early: exhausted after %d of %d samples", len(samples), k)
    return samples
