"""Experiment drivers behind the command-line interface.

Each driver is a deterministic function of its configuration and returns
plain row records; formatting and output live in :mod:`unique_sampling.cli`.
Independent trials draw from generators spawned off one
:class:`numpy.random.SeedSequence`, so results do not depend on trial order.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Hashable, Sequence
from dataclasses import dataclass

import numpy as np

from .adapters.random import sample_iid
from .beam import sample_batches, stochastic_beam_search
from .choice import Distribution, Trace, make_distribution
from .config import RunConfig
from .errors import TooLarge
from .estimators import hge_estimate, monte_carlo_estimate, repeated_hge_estimate, tge_estimate
from .instrumentation import Counters
from .oracle import check_trace_injective, exact_tsp
from .programs.markov import MarkovSequenceModel, PositionalSequenceModel
from .programs.specs import ExplicitSpec, MarkovSpec, ToySpec, create_expander, create_program
from .programs.tsp import TspInstance, default_temperature, greedy_tour, insertion_program
from .unique_randomizer import UniqueRandomizer, sample_wor

__all__ = [
    "BenchRow",
    "DEFAULT_K_GRID",
    "ESTIMATORS",
    "EstimateRow",
    "SampleRecord",
    "SampleRun",
    "TspRow",
    "bench",
    "estimator_benchmark",
    "run_estimators",
    "run_samples",
    "run_tsp",
]

logger = logging.getLogger(__name__)

DEFAULT_K_GRID = (1, 2, 5, 10, 20, 50, 100)
ESTIMATORS = ("monte_carlo", "hge", "hge_normalized", "hge_repeated_normalized", "tge")
REPEATS = 10


@dataclass(frozen=True, slots=True)
class SampleRecord:
    output: Hashable
    trace: Trace
    probability: float
    duplicate: bool = False


@dataclass(frozen=True, slots=True)
class SampleRun:
    records: list[SampleRecord]
    exhausted: bool
    counters: Counters


def run_samples(config: RunConfig, spec: ToySpec | MarkovSpec | ExplicitSpec) -> SampleRun:
    """Draw ``config.k`` samples from the program in ``spec`` with ``config.method``."""

    rng = np.random.default_rng(config.seed)
    counters = Counters()
    program = create_program(spec)
    if isinstance(spec, ExplicitSpec):
        report = check_trace_injective(program, config.max_traces)
        if not report:
            logger.warning(
                "Traces %s and %s give the same output; samples are distinct traces, not distinct outputs",
                *report.counterexample,
            )
    if config.method == "iid":
        drawn = sample_iid(program, config.k, rng, counters=counters)
        records = [SampleRecord(s.output, s.trace, s.probability, s.duplicate) for s in drawn]
        return SampleRun(records, False, counters)
    if config.method == "wor":
        sampler = UniqueRandomizer(rng, counters=counters)
        records = [SampleRecord(*sample) for sample in sample_wor(program, config.k, sampler)]
        return SampleRun(records, len(records) < config.k, counters)
    if config.method == "sbs":
        if config.k == 0:
            return SampleRun([], False, counters)
        result = stochastic_beam_search(
            create_expander(spec), config.k, rng, max_workers=config.max_workers, counters=counters
        )
        records = [SampleRecord(s.output, s.trace, s.probability) for s in result.samples]
        return SampleRun(records, len(records) < config.k, counters)
    sampler = UniqueRandomizer(rng, counters=counters)
    drawn = sample_batches(program, sampler, config.k, config.batch_size, rng, max_workers=config.max_workers)
    records = [SampleRecord(s.output, s.trace, s.probability) for s in drawn]
    return SampleRun(records, len(records) < config.k, counters)


@dataclass(frozen=True, slots=True)
class TspRow:
    method: str
    samples: int
    best_cost: float
    mean_cost: float
    duplicates: int
    distribution_computations: int
    gap: float | None


def _gap(cost: float, optimum: float | None) -> float | None:
    if optimum is None:
        return None
    return (cost - optimum) / optimum


def run_tsp(config: RunConfig, instance: TspInstance) -> list[TspRow]:
    """Compare greedy insertion with i.i.d., incremental and batched sampling on one instance."""

    temperature = config.temperature if config.temperature is not None else default_temperature(instance.n)
    try:
        optimum: float | None = exact_tsp(instance).cost
    except TooLarge:
        logger.warning("Instance has %d nodes; optimality gap disabled", instance.n)
        optimum = None

    program = insertion_program(instance, temperature)
    greedy = greedy_tour(instance)
    rows = [TspRow("greedy", 1, greedy.cost, greedy.cost, 0, 0, _gap(greedy.cost, optimum))]
    streams = np.random.SeedSequence(config.seed).spawn(3)

    counters = Counters()
    drawn = sample_iid(program, config.k, np.random.default_rng(streams[0]), counters=counters)
    rows.append(_tsp_row("iid", [s.output.cost for s in drawn], sum(s.duplicate for s in drawn), counters, optimum))

    counters = Counters()
    sampler = UniqueRandomizer(np.random.default_rng(streams[1]), counters=counters)
    unique = sample_wor(program, config.k, sampler)
    rows.append(_tsp_row("wor", [s.output.cost for s in unique], 0, counters, optimum))

    counters = Counters()
    rng = np.random.default_rng(streams[2])
    sampler = UniqueRandomizer(rng, counters=counters)
    batched = sample_batches(program, sampler, config.k, config.batch_size, rng, max_workers=config.max_workers)
    rows.append(_tsp_row("batched", [s.output.cost for s in batched], 0, counters, optimum))
    return rows


def _tsp_row(method: str, costs: Sequence[float], duplicates: int, counters: Counters, optimum: float | None) -> TspRow:
    if not costs:
        return TspRow(method, 0, math.nan, math.nan, duplicates, counters.distribution_computations, None)
    best = min(costs)
    return TspRow(
        method,
        len(costs),
        best,
        math.fsum(costs) / len(costs),
        duplicates,
        counters.distribution_computations,
        _gap(best, optimum),
    )


@dataclass(frozen=True, slots=True)
class EstimateRow:
    estimator: str
    k: int
    mean: float
    q05: float
    q25: float
    q75: float
    q95: float


def estimator_benchmark(size: int = 100, power: float = 2.0) -> tuple[Distribution, Callable[[Hashable], float]]:
    """Skewed benchmark: ``p(s)`` proportional to ``rank ** -power`` and ``f(s) = p(s) * rank``."""

    distribution = make_distribution([(rank + 1) ** -power for rank in range(size)])

    def f(output: Hashable) -> float:
        (index,) = output  # type: ignore[misc]
        return distribution[index] * (index + 1)

    return distribution, f


def run_estimators(
    config: RunConfig,
    *,
    k_grid: Sequence[int] = DEFAULT_K_GRID,
    size: int = 100,
) -> tuple[list[EstimateRow], float]:
    """Run every estimator on ``config.trials`` independent sample sequences.

    Returns the rows (one per estimator and ``k``) and the exact expectation.
    """

    distribution, f = estimator_benchmark(size)
    model = PositionalSequenceModel((distribution,))
    exact = math.fsum(distribution[i] * f((i,)) for i in range(size))
    grid = sorted({k for k in k_grid if 1 <= k <= size})
    results: dict[str, dict[int, list[float]]] = {name: {k: [] for k in grid} for name in ESTIMATORS}

    for stream in np.random.SeedSequence(config.seed).spawn(config.trials):
        rng = np.random.default_rng(stream)
        iid = [sample.output for sample in sample_iid(model.program, grid[-1], rng)]
        sampler = UniqueRandomizer(rng)
        samples: list = []
        for k in grid:
            samples.extend(sample_wor(model.program, k - len(samples), sampler))
            remaining = sampler.remaining_mass
            results["monte_carlo"][k].append(monte_carlo_estimate(iid[:k], f))
            results["hge"][k].append(hge_estimate(samples, f, rng, remaining=remaining))
            results["hge_normalized"][k].append(hge_estimate(samples, f, rng, normalized=True, remaining=remaining))
            results["hge_repeated_normalized"][k].append(
                repeated_hge_estimate(samples, f, rng, normalized=True, repeats=REPEATS, remaining=remaining)
            )
            results["tge"][k].append(tge_estimate(stochastic_beam_search(model.expander(), k, rng), f))

    rows = []
    for name in ESTIMATORS:
        for k in grid:
            values = np.asarray(results[name][k])
            q05, q25, q75, q95 = np.quantile(values, [0.05, 0.25, 0.75, 0.95])
            rows.append(EstimateRow(name, k, float(values.mean()), float(q05), float(q25), float(q75), float(q95)))
    logger.info("Exact expectation %.9g over %d sequences", exact, config.trials)
    return rows, exact


@dataclass(frozen=True, slots=True)
class BenchRow:
    method: str
    length: int
    k: int
    batch_size: int
    batches: int
    expansions: int
    distribution_computations: int
    nodes_allocated: int


def bench(config: RunConfig, *, length: int = 5, vocabulary_size: int = 4) -> list[BenchRow]:
    """Count expansions of each sampler on synthetic fixed-length spaces.

    ``sbs`` runs on uniform sequences; ``ur-best`` on sequences that share all
    but their last token; ``ur-worst`` on sequences that differ only in their
    first token; ``batched`` sweeps every batch size dividing ``k`` on a space
    whose prefixes are shared with probability close to one. With ``k``
    fixed, fewer and larger batches cost more expansions.
    """

    k = max(config.k, 1)
    vocabulary_size = max(vocabulary_size, k)
    rows: list[BenchRow] = []

    def record(method: str, batch_size: int, counters: Counters) -> None:
        rows.append(
            BenchRow(
                method,
                length,
                k,
                batch_size,
                -(-k // batch_size),
                counters.expansions,
                counters.distribution_computations,
                counters.nodes_allocated,
            )
        )

    counters = Counters()
    stochastic_beam_search(
        PositionalSequenceModel.uniform(vocabulary_size, length).expander(),
        k,
        np.random.default_rng(config.seed),
        max_workers=config.max_workers,
        counters=counters,
    )
    record("sbs", k, counters)

    for method, program in (
        ("ur-best", PositionalSequenceModel.shared_prefix(vocabulary_size, length).program),
        ("ur-worst", MarkovSequenceModel.copy_first(vocabulary_size, length).program),
    ):
        counters = Counters()
        sample_wor(program, k, UniqueRandomizer(np.random.default_rng(config.seed), counters=counters))
        record(method, 1, counters)

    near_shared = PositionalSequenceModel.shared_prefix(vocabulary_size, length, epsilon=1e-6).program
    for batch_size in sorted((b for b in range(1, k + 1) if k % b == 0), reverse=True):
        counters = Counters()
        rng = np.random.default_rng(config.seed)
        sampler = UniqueRandomizer(rng, counters=counters)
        sample_batches(near_shared, sampler, k, batch_size, rng, max_workers=config.max_workers)
        record("batched", batch_size, counters)
    return rows
