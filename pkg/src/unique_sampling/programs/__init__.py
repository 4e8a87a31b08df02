"""Bundled randomized programs."""

from .explicit import ExplicitProgram
from .markov import (
    MarkovExpander,
    MarkovSequenceModel,
    PositionalSequenceModel,
    SequenceExpander,
    markov_program,
    positional_program,
)
from .specs import create_expander, create_program, load_program_spec, parse_program_spec
from .toy import toy_program
from .tsp import (
    Tour,
    TspInstance,
    default_temperature,
    farthest_insertion,
    greedy_tour,
    insertion_program,
    read_instance,
    tour_cost,
    write_instance,
)

__all__ = [
    "ExplicitProgram",
    "MarkovExpander",
    "MarkovSequenceModel",
    "PositionalSequenceModel",
    "SequenceExpander",
    "Tour",
    "TspInstance",
    "create_expander",
    "create_program",
    "default_temperature",
    "farthest_insertion",
    "greedy_tour",
    "insertion_program",
    "load_program_spec",
    "markov_program",
    "parse_program_spec",
    "positional_program",
    "read_instance",
    "tour_cost",
    "toy_program",
    "write_instance",
]
