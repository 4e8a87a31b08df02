"""Command-line interface.

Every subcommand writes CSV with a header row to ``--out`` or standard
output; diagnostics go to standard error. Floats are printed with nine
significant digits and empty cells mean "not applicable".

``sample``
    ``index, output, trace, probability, cumulative_probability, duplicate``.
    ``cumulative_probability`` is the mass of the distinct traces seen so
    far. If the space runs out before ``--k`` samples, a final row with
    ``index`` set to ``exhausted`` carries the sampled mass.
``tsp``
    ``method, samples, best_cost, mean_cost, duplicates,
    distribution_computations, gap``; ``gap`` is relative to the optimum and
    left empty above 13 nodes.
``estimate``
    ``estimator, k, mean, q05, q25, q75, q95``.
``bench``
    ``method, L, k, batch_size, batches, expansions,
    distribution_computations, nodes_allocated``.

Exit codes: 0 on success (early exhaustion included), 1 on usage or
configuration errors, 2 when an input file cannot be parsed.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import math
import sys
from collections.abc import Hashable, Iterable, Iterator, Sequence
from pathlib import Path
from typing import IO, Any, NoReturn

import numpy as np

from .config import RunConfig, Settings, load_settings
from .errors import ConfigurationError, ParseError, SamplingError
from .experiments import bench, run_estimators, run_samples, run_tsp
from .programs.specs import ToySpec, load_program_spec
from .programs.tsp import TspInstance, read_instance

__all__ = ["build_parser", "main"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2

SAMPLE_COLUMNS = ("index", "output", "trace", "probability", "cumulative_probability", "duplicate")
TSP_COLUMNS = ("method", "samples", "best_cost", "mean_cost", "duplicates", "distribution_computations", "gap")
ESTIMATE_COLUMNS = ("estimator", "k", "mean", "q05", "q25", "q75", "q95")
BENCH_COLUMNS = ("method", "L", "k", "batch_size", "batches", "expansions", "distribution_computations", "nodes_allocated")


class UsageError(Exception):
    """Raised instead of exiting when the command line is malformed."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def _temperature(value: str) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid temperature {value!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, help="base seed (UNIQUE_SAMPLING_SEED, default 0)")
    common.add_argument("--method", choices=("iid", "wor", "sbs", "batched"), help="sampling method (default wor)")
    common.add_argument("--k", type=int, help="number of samples (default 10)")
    common.add_argument("--batch-size", type=int, help="batch size of the batched method (default 1)")
    common.add_argument("--temperature", type=_temperature, help="insertion temperature; 'inf' is uniform")
    common.add_argument("--out", type=Path, help="write CSV here instead of standard output")
    common.add_argument("--trials", type=int, help="independent sequences for estimate (default 2000)")
    common.add_argument("--max-workers", type=int, help="threads per beam-search level")
    common.add_argument("--log-level", help="CRITICAL, ERROR, WARNING, INFO or DEBUG")

    parser = _Parser(prog="unique-sampling", description="Sample randomized programs without replacement.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sample = commands.add_parser("sample", parents=[common], help="sample a program spec")
    sample.add_argument("spec", nargs="?", type=Path, help="program spec file (default: the toy program)")

    tsp = commands.add_parser("tsp", parents=[common], help="compare samplers on a TSP instance")
    source = tsp.add_mutually_exclusive_group(required=True)
    source.add_argument("--instance", type=Path, help="instance file")
    source.add_argument("--n", type=int, help="size of a random instance drawn from --seed")

    commands.add_parser("estimate", parents=[common], help="estimator experiment")

    bench_parser = commands.add_parser("bench", parents=[common], help="expansion counts")
    bench_parser.add_argument("--length", type=int, default=5, help="sequence length L (default 5)")
    bench_parser.add_argument("--vocab", type=int, default=4, help="vocabulary size, raised to k if smaller")
    return parser


def _number(value: float | None) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return f"{value:.9g}"


def _tokens(values: Iterable[Any]) -> str:
    return " ".join(str(value) for value in values)


def _render_output(output: Hashable) -> str:
    if isinstance(output, tuple) and all(isinstance(item, (int, np.integer)) for item in output):
        return _tokens(output)
    order = getattr(output, "order", None)
    if order is not None:
        return _tokens(order)
    return str(output)


@contextlib.contextmanager
def _open_output(path: Path | None) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
        return
    with path.open("w", encoding="utf-8", newline="") as handle:
        yield handle


def _write(path: Path | None, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    with _open_output(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_sample(config: RunConfig, spec_path: Path | None) -> None:
    spec = load_program_spec(spec_path) if spec_path is not None else ToySpec(kind="figure3")
    run = run_samples(config, spec)
    rows: list[list[str]] = []
    seen: set[tuple[int, ...]] = set()
    mass: list[float] = []
    for index, record in enumerate(run.records):
        if record.trace not in seen:
            seen.add(record.trace)
            mass.append(record.probability)
        rows.append(
            [
                str(index),
                _render_output(record.output),
                _tokens(record.trace),
                _number(record.probability),
                _number(math.fsum(mass)),
                "true" if record.duplicate else "false",
            ]
        )
    if run.exhausted:
        logger.warning("Space exhausted after %d of %d samples", len(run.records), config.k)
        rows.append(["exhausted", "", "", "", _number(math.fsum(mass)), ""])
    _write(config.out, SAMPLE_COLUMNS, rows)
    logger.info("sample: %d rows, counters %s", len(run.records), run.counters.as_dict())


def cmd_tsp(config: RunConfig, instance: TspInstance) -> None:
    rows = [
        [
            row.method,
            str(row.samples),
            _number(row.best_cost),
            _number(row.mean_cost),
            str(row.duplicates),
            str(row.distribution_computations),
            _number(row.gap),
        ]
        for row in run_tsp(config, instance)
    ]
    _write(config.out, TSP_COLUMNS, rows)
    logger.info("tsp: n=%d", instance.n)


def cmd_estimate(config: RunConfig) -> None:
    rows, exact = run_estimators(config)
    _write(
        config.out,
        ESTIMATE_COLUMNS,
        (
            [row.estimator, str(row.k), *(_number(value) for value in (row.mean, row.q05, row.q25, row.q75, row.q95))]
            for row in rows
        ),
    )
    logger.info("estimate: exact value %.9g", exact)


def cmd_bench(config: RunConfig, *, length: int, vocabulary_size: int) -> None:
    rows = bench(config, length=length, vocabulary_size=vocabulary_size)
    _write(
        config.out,
        BENCH_COLUMNS,
        (
            [
                row.method,
                str(row.length),
                str(row.k),
                str(row.batch_size),
                str(row.batches),
                str(row.expansions),
                str(row.distribution_computations),
                str(row.nodes_allocated),
            ]
            for row in rows
        ),
    )


def _run_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    return RunConfig.build(
        seed=settings.seed,
        method=args.method,
        k=args.k,
        batch_size=args.batch_size,
        temperature=args.temperature,
        trials=settings.trials,
        max_traces=settings.max_traces,
        out=args.out,
        max_workers=settings.max_workers,
    )


def _dispatch(args: argparse.Namespace) -> None:
    settings = load_settings(
        seed=args.seed,
        trials=args.trials,
        log_level=args.log_level,
        max_workers=args.max_workers,
    )
    logging.basicConfig(
        level=settings.logging_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    config = _run_config(args, settings)
    if args.command == "sample":
        cmd_sample(config, args.spec)
    elif args.command == "tsp":
        if args.instance is not None:
            instance = read_instance(args.instance)
        else:
            if args.n < 3:
                raise ConfigurationError("--n must be at least 3")
            instance = TspInstance.random(args.n, np.random.default_rng(config.seed))
        cmd_tsp(config, instance)
    elif args.command == "estimate":
        cmd_estimate(config)
    else:
        if args.length < 1 or args.vocab < 1:
            raise ConfigurationError("--length and --vocab must be positive")
        cmd_bench(config, length=args.length, vocabulary_size=args.vocab)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        _dispatch(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigurationError, SamplingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK
