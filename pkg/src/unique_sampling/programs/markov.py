"""Table-driven sequence models.

These stand in for neural sequence models: every choice emits one token, so
the programs are trace-injective by construction. Distributions are handed to
the choice source lazily, which lets trie-backed sources skip the table
lookup on prefixes they have already expanded.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import partial
from typing import Any

import numpy as np

from unique_sampling.beam import BeamState, Expansion
from unique_sampling.choice import ChoiceSource, Distribution, RandomizedProgram, make_distribution

__all__ = [
    "MarkovExpander",
    "MarkovSequenceModel",
    "PositionalSequenceModel",
    "SequenceExpander",
    "markov_program",
    "positional_program",
]

MAX_ORDER = 2

Context = tuple[int, ...]


def _as_distribution(weights: Sequence[float] | Distribution, vocabulary_size: int, label: str) -> Distribution:
    distribution = make_distribution(weights)
    if len(distribution) != vocabulary_size:
        raise ValueError(f"{label} has {len(distribution)} entries, expected {vocabulary_size}")
    return distribution


@dataclass(frozen=True, slots=True)
class MarkovSequenceModel:
    """Next-token tables conditioned on the previous ``order`` tokens.

    ``tables`` maps a context (the last ``min(order, position)`` tokens) to a
    distribution over the vocabulary; contexts without an entry fall back to
    ``default``. When ``length_distribution`` is given, the sequence length is
    drawn first (entry ``i`` is the probability of length ``i``) and
    ``length`` is ignored.
    """

    vocabulary_size: int
    length: int
    order: int = 1
    tables: Mapping[Context, Distribution] = field(default_factory=dict)
    default: Distribution | None = None
    length_distribution: Distribution | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.vocabulary_size, int) or self.vocabulary_size < 1:
            raise ValueError("vocabulary_size must be a positive integer")
        if not isinstance(self.length, int) or self.length < 0:
            raise ValueError("length must be a non-negative integer")
        if not isinstance(self.order, int) or not 0 <= self.order <= MAX_ORDER:
            raise ValueError(f"order must be between 0 and {MAX_ORDER}")

        tables: dict[Context, Distribution] = {}
        for context, weights in self.tables.items():
            context = tuple(int(token) for token in context)
            if len(context) > self.order:
                raise ValueError(f"Context {context!r} is longer than the model order {self.order}")
            if any(not 0 <= token < self.vocabulary_size for token in context):
                raise ValueError(f"Context {context!r} uses tokens outside the vocabulary")
            tables[context] = _as_distribution(weights, self.vocabulary_size, f"Table for context {context!r}")
        object.__setattr__(self, "tables", tables)
        if self.default is not None:
            object.__setattr__(self, "default", _as_distribution(self.default, self.vocabulary_size, "Default table"))
        if self.length_distribution is not None:
            object.__setattr__(self, "length_distribution", make_distribution(self.length_distribution))

        for context in self.reachable_contexts():
            if context not in tables and self.default is None:
                raise ValueError(f"No table for context {context!r} and no default table")

    @property
    def max_length(self) -> int:
        if self.length_distribution is not None:
            return len(self.length_distribution) - 1
        return self.length

    def reachable_contexts(self) -> list[Context]:
        contexts: list[Context] = []
        for size in range(min(self.order, self.max_length) + 1):
            if size == self.max_length:
                break
            contexts.extend(itertools.product(range(self.vocabulary_size), repeat=size))
        return contexts

    def context(self, tokens: Sequence[int]) -> Context:
        if self.order == 0:
            return ()
        return tuple(tokens[-self.order :])

    def distribution(self, context: Context) -> Distribution:
        table = self.tables.get(context, self.default)
        if table is None:
            raise KeyError(f"No table for context {context!r}")
        return table

    @property
    def program(self) -> RandomizedProgram:
        return partial(markov_program, self)

    def expander(self) -> MarkovExpander:
        return MarkovExpander(self)

    @classmethod
    def uniform(cls, vocabulary_size: int, length: int, *, order: int = 0) -> MarkovSequenceModel:
        return cls(
            vocabulary_size=vocabulary_size,
            length=length,
            order=order,
            default=make_distribution([1.0] * vocabulary_size),
        )

    @classmethod
    def random(
        cls,
        vocabulary_size: int,
        length: int,
        rng: np.random.Generator,
        *,
        order: int = 1,
        concentration: float = 1.0,
    ) -> MarkovSequenceModel:
        """Draw every reachable table from a symmetric Dirichlet distribution."""

        if concentration <= 0.0:
            raise ValueError("concentration must be positive")
        skeleton = cls.uniform(vocabulary_size, length, order=order)
        tables = {
            context: make_distribution(rng.dirichlet([concentration] * vocabulary_size))
            for context in skeleton.reachable_contexts()
        }
        return cls(vocabulary_size=vocabulary_size, length=length, order=order, tables=tables)

    @classmethod
    def copy_first(cls, vocabulary_size: int, length: int) -> MarkovSequenceModel:
        """Uniform first token, then repeat it: traces differ only in their first choice."""

        tables: dict[Context, Distribution] = {(): make_distribution([1.0] * vocabulary_size)}
        for token in range(vocabulary_size):
            one_hot = [0.0] * vocabulary_size
            one_hot[token] = 1.0
            tables[(token,)] = make_distribution(one_hot)
        return cls(vocabulary_size=vocabulary_size, length=length, order=1, tables=tables)


def markov_program(model: MarkovSequenceModel, choice: ChoiceSource) -> tuple[int, ...]:
    """Emit a token sequence from ``model``."""

    if model.length_distribution is not None:
        length = choice.choose(model.length_distribution)
    else:
        length = model.length
    tokens: list[int] = []
    for _ in range(length):
        context = model.context(tokens)
        tokens.append(choice.choose(partial(model.distribution, context)))
    return tuple(tokens)


@dataclass(frozen=True, slots=True)
class PositionalSequenceModel:
    """Fixed-length sequences with one independent distribution per position."""

    distributions: tuple[Distribution, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "distributions", tuple(make_distribution(d) for d in self.distributions))

    @property
    def length(self) -> int:
        return len(self.distributions)

    @property
    def program(self) -> RandomizedProgram:
        return partial(positional_program, self)

    def expander(self) -> SequenceExpander:
        return SequenceExpander(self.length, lambda tokens: self.distributions[len(tokens)])

    @classmethod
    def uniform(cls, vocabulary_size: int, length: int) -> PositionalSequenceModel:
        return cls(tuple(make_distribution([1.0] * vocabulary_size) for _ in range(length)))

    @classmethod
    def shared_prefix(cls, vocabulary_size: int, length: int, *, epsilon: float = 0.0) -> PositionalSequenceModel:
        """Token 0 with probability ``1 - epsilon`` everywhere but the last position, which is uniform."""

        if not 0.0 <= epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")
        if vocabulary_size < 2 and epsilon > 0.0:
            raise ValueError("epsilon needs at least two tokens")
        rest = epsilon / (vocabulary_size - 1) if vocabulary_size > 1 else 0.0
        concentrated = make_distribution([1.0 - epsilon] + [rest] * (vocabulary_size - 1))
        uniform = make_distribution([1.0] * vocabulary_size)
        return cls((concentrated,) * (length - 1) + (uniform,))


def positional_program(model: PositionalSequenceModel, choice: ChoiceSource) -> tuple[int, ...]:
    return tuple(choice.choose(distribution) for distribution in model.distributions)


class SequenceExpander:
    """Beam-search expander over fixed-length token sequences.

    The state context is the token tuple emitted so far; children at the final
    position are terminal and output that tuple.
    """

    def __init__(self, length: int, next_distribution: Any) -> None:
        self.length = length
        self.next_distribution = next_distribution

    def initial_context(self) -> tuple[int, ...]:
        return ()

    def expand(self, state: BeamState) -> list[Expansion]:
        tokens: tuple[int, ...] = state.context
        distribution = self.next_distribution(tokens)
        terminal = len(tokens) + 1 == self.length
        children = []
        for token, weight in enumerate(distribution):
            extended = (*tokens, token)
            children.append(
                Expansion(
                    token,
                    math.log(weight) if weight > 0.0 else -math.inf,
                    extended,
                    terminal,
                    extended if terminal else None,
                )
            )
        return children


class MarkovExpander(SequenceExpander):
    """Expander for fixed-length :class:`MarkovSequenceModel` instances."""

    def __init__(self, model: MarkovSequenceModel) -> None:
        if model.length_distribution is not None:
            raise ValueError("Beam search expanders need a fixed sequence length")
        if model.length < 1:
            raise ValueError("Beam search expanders need at least one token")
        super().__init__(model.length, lambda tokens: model.distribution(model.context(tokens)))
        self.model = model
