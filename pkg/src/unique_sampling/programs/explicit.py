"""Programs defined by an explicit table of complete traces."""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass, field

from unique_sampling.choice import TOLERANCE, ChoiceSource, Distribution, Trace, make_distribution
from unique_sampling.errors import InvalidProbabilities

__all__ = ["ExplicitProgram"]


@dataclass(frozen=True, slots=True)
class ExplicitProgram:
    """Replay a fixed distribution over prefix-free traces.

    At every prefix the program chooses the next index with probability
    proportional to the total probability of the listed traces below it, so
    each listed trace is produced with exactly its listed probability. Outputs
    default to the trace itself.
    """

    traces: Mapping[Trace, float]
    outputs: Mapping[Trace, Hashable] = field(default_factory=dict)
    _branches: dict[Trace, Distribution] = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        if not self.traces:
            raise ValueError("An explicit program needs at least one trace")
        table: dict[Trace, float] = {}
        for trace, probability in self.traces.items():
            key = tuple(int(index) for index in trace)
            if any(index < 0 for index in key):
                raise ValueError(f"Trace {list(key)!r} has a negative index")
            if key in table:
                raise ValueError(f"Trace {list(key)!r} is listed twice")
            if not math.isfinite(probability) or probability <= 0.0:
                raise InvalidProbabilities(f"Trace {list(key)!r} has probability {probability!r}")
            table[key] = float(probability)
        total = math.fsum(table.values())
        if abs(total - 1.0) > TOLERANCE:
            raise InvalidProbabilities(f"Trace probabilities sum to {total!r}, expected 1")

        ordered = sorted(table)
        for shorter, longer in zip(ordered, ordered[1:]):
            if longer[: len(shorter)] == shorter:
                raise ValueError(f"Trace {list(shorter)!r} is a prefix of {list(longer)!r}")

        below: dict[Trace, dict[int, float]] = defaultdict(dict)
        for trace, probability in table.items():
            for depth in range(len(trace)):
                children = below[trace[:depth]]
                children[trace[depth]] = children.get(trace[depth], 0.0) + probability
        branches = {
            prefix: make_distribution([children.get(index, 0.0) for index in range(max(children) + 1)])
            for prefix, children in below.items()
        }
        outputs = {tuple(int(index) for index in trace): output for trace, output in self.outputs.items()}
        unknown = set(outputs) - set(table)
        if unknown:
            raise ValueError(f"Outputs given for unlisted traces {sorted(unknown)!r}")
        object.__setattr__(self, "traces", table)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "_branches", branches)

    @classmethod
    def from_rows(cls, rows: Sequence[tuple[Sequence[int], float, Hashable]]) -> ExplicitProgram:
        """Build from ``(trace, probability, output)`` rows; ``None`` outputs default to the trace."""

        traces: dict[Trace, float] = {}
        outputs: dict[Trace, Hashable] = {}
        for trace, probability, output in rows:
            key = tuple(int(index) for index in trace)
            if key in traces:
                raise ValueError(f"Trace {list(key)!r} is listed twice")
            traces[key] = probability
            if output is not None:
                outputs[key] = output
        return cls(traces, outputs)

    def __call__(self, choice: ChoiceSource) -> Hashable:
        prefix: Trace = ()
        while prefix not in self.traces:
            index = choice.choose(self._branches[prefix])
            prefix = (*prefix, index)
        return self.outputs.get(prefix, prefix)
