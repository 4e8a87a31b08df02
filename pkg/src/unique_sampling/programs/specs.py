"""JSON program files for the command line.

A spec is a JSON object whose ``kind`` selects the program:

``{"kind": "figure3"}``
    the bundled length-then-tokens program; ``"toy"`` is accepted as an alias.
``{"kind": "markov", "vocabulary_size": 3, "length": 2, "order": 1, "tables": {"": [...], "0": [...]}}``
    a Markov sequence model; table keys are comma-separated contexts, and
    ``default``, ``length_distribution``, or ``random_seed`` (Dirichlet
    tables with ``concentration``) may replace explicit tables.
``{"kind": "explicit", "traces": [{"trace": [0, 1], "probability": 0.5, "output": "a"}, ...]}``
    a prefix-free table of complete traces.
"""

from __future__ import annotations

import json
from collections.abc import Hashable, Mapping
from pathlib import Path
from typing import Annotated, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from unique_sampling.beam import Expander, ProgramExpander
from unique_sampling.choice import RandomizedProgram
from unique_sampling.errors import ParseError, SamplingError

from .explicit import ExplicitProgram
from .markov import MarkovSequenceModel
from .toy import toy_program

__all__ = [
    "ExplicitSpec",
    "MarkovSpec",
    "ProgramSpec",
    "ToySpec",
    "create_expander",
    "create_program",
    "load_program_spec",
    "parse_program_spec",
]


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ToySpec(_Spec):
    kind: Literal["figure3", "toy"]


class MarkovSpec(_Spec):
    kind: Literal["markov"]
    vocabulary_size: int = Field(ge=1)
    length: int = Field(default=0, ge=0)
    order: int = Field(default=1, ge=0, le=2)
    tables: dict[str, list[float]] = Field(default_factory=dict)
    default: list[float] | None = None
    length_distribution: list[float] | None = None
    random_seed: int | None = Field(default=None, ge=0)
    concentration: float = Field(default=1.0, gt=0.0)

    @field_validator("tables")
    @classmethod
    def _check_context_keys(cls, tables: dict[str, list[float]]) -> dict[str, list[float]]:
        for key in tables:
            _parse_context(key)
        return tables


class ExplicitRow(_Spec):
    trace: list[Annotated[int, Field(ge=0)]]
    probability: float = Field(gt=0.0)
    output: Any = None


class ExplicitSpec(_Spec):
    kind: Literal["explicit"]
    traces: list[ExplicitRow] = Field(min_length=1)


class ProgramSpec(BaseModel):
    spec: Annotated[ToySpec | MarkovSpec | ExplicitSpec, Field(discriminator="kind")]


def _parse_context(key: str) -> tuple[int, ...]:
    if not key.strip():
        return ()
    try:
        return tuple(int(part) for part in key.split(","))
    except ValueError as exc:
        raise ValueError(f"Context key {key!r} must be comma-separated integers") from exc


def _hashable(value: Any) -> Hashable:
    if isinstance(value, list):
        return tuple(_hashable(item) for item in value)
    if isinstance(value, dict):
        return tuple(sorted((key, _hashable(item)) for key, item in value.items()))
    return value


def parse_program_spec(payload: str | Mapping[str, Any]) -> ToySpec | MarkovSpec | ExplicitSpec:
    """Validate a spec given as JSON text or an already-decoded mapping."""

    try:
        data = json.loads(payload) if isinstance(payload, str) else dict(payload)
        return ProgramSpec.model_validate({"spec": data}).spec
    except (json.JSONDecodeError, ValidationError, TypeError) as exc:
        raise ParseError(f"Invalid program spec: {exc}") from exc


def load_program_spec(path: str | Path) -> ToySpec | MarkovSpec | ExplicitSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"Cannot read program spec {path}: {exc}") from exc
    return parse_program_spec(text)


def _markov_model(spec: MarkovSpec) -> MarkovSequenceModel:
    if spec.random_seed is not None:
        return MarkovSequenceModel.random(
            spec.vocabulary_size,
            spec.length,
            np.random.default_rng(spec.random_seed),
            order=spec.order,
            concentration=spec.concentration,
        )
    return MarkovSequenceModel(
        vocabulary_size=spec.vocabulary_size,
        length=spec.length,
        order=spec.order,
        tables={_parse_context(key): weights for key, weights in spec.tables.items()},
        default=spec.default,
        length_distribution=spec.length_distribution,
    )


def create_program(spec: ToySpec | MarkovSpec | ExplicitSpec) -> RandomizedProgram:
    """Return the randomized program described by ``spec``.

    Raises :class:`ParseError` when the spec is well-formed but describes an
    invalid program (for example tables that do not sum to one).
    """

    try:
        if isinstance(spec, ToySpec):
            return toy_program
        if isinstance(spec, MarkovSpec):
            return _markov_model(spec).program
        return ExplicitProgram.from_rows([(row.trace, row.probability, _hashable(row.output)) for row in spec.traces])
    except (ValueError, SamplingError) as exc:
        raise ParseError(f"Invalid {spec.kind} program: {exc}") from exc


def create_expander(spec: ToySpec | MarkovSpec | ExplicitSpec) -> Expander:
    """Return a beam-search expander for ``spec``.

    Fixed-length Markov models get a table-driven expander; every other
    program is explored by replaying it.
    """

    program = create_program(spec)
    if isinstance(spec, MarkovSpec) and spec.length_distribution is None and spec.length > 0:
        return _markov_model(spec).expander()
    return ProgramExpander(program)
