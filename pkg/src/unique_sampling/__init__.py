"""Public package interface for unique_sampling."""

from .beam import (
    BeamSample,
    BeamSearchResult,
    ProgramExpander,
    sample_batch_wor,
    sample_batches,
    stochastic_beam_search,
)
from .choice import (
    ChoiceSource,
    Distribution,
    RandomizedProgram,
    Trace,
    make_distribution,
    run_with_replay,
    trace_probability,
)
from .dynamic_trie import DynamicUniqueRandomizer
from .errors import (
    ConfigurationError,
    DegenerateInstance,
    DistributionMismatch,
    EditDuringRun,
    EmptyDistribution,
    EmptySample,
    EmptySpace,
    Exhausted,
    InvalidProbabilities,
    InvalidTour,
    InvalidWeight,
    KTooLarge,
    LengthMismatch,
    MissingThreshold,
    NotMidRun,
    ParseError,
    SamplingError,
    SpaceTooLarge,
    TooLarge,
    TraceMismatch,
    UnknownPath,
)
from .estimators import (
    HindsightSequence,
    WeightedSample,
    hge_estimate,
    hindsight_gumbels,
    monte_carlo_estimate,
    repeated_hge_estimate,
    tge_estimate,
)
from .instrumentation import Counters, expansion_counter
from .unique_randomizer import (
    UniqueRandomizer,
    UniqueSample,
    initialize,
    is_exhausted,
    sample_until,
    sample_wor,
)

__all__ = [
    "BeamSample",
    "BeamSearchResult",
    "ChoiceSource",
    "Counters",
    "Distribution",
    "DynamicUniqueRandomizer",
    "HindsightSequence",
    "ProgramExpander",
    "RandomizedProgram",
    "Trace",
    "UniqueRandomizer",
    "UniqueSample",
    "WeightedSample",
    "expansion_counter",
    "hge_estimate",
    "hindsight_gumbels",
    "initialize",
    "is_exhausted",
    "make_distribution",
    "monte_carlo_estimate",
    "repeated_hge_estimate",
    "run_with_replay",
    "sample_batch_wor",
    "sample_batches",
    "sample_until",
    "sample_wor",
    "stochastic_beam_search",
    "tge_estimate",
    "trace_probability",
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
