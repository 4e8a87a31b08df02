"""Operation counters shared by every sampler."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, fields

__all__ = ["Counters", "expansion_counter"]


@dataclass(slots=True)
class Counters:
    """Mutable tally of the work a sampler performed.

    ``expansions`` counts node expansions (trie nodes whose children were
    created, or ``expand`` calls in a beam search). ``distribution_computations``
    counts how many distributions were actually materialised, which is lower
    than the number of choices when lazy distributions are skipped.
    """

    expansions: int = 0
    distribution_computations: int = 0
    nodes_allocated: int = 0
    choices: int = 0
    termination_steps: int = 0
    runs: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False, compare=False)

    def add(self, name: str, amount: int = 1) -> None:
        """Increment ``name`` by ``amount``; safe to call from worker threads."""

        with self._lock:
            setattr(self, name, getattr(self, name) + amount)

    def reset(self) -> None:
        with self._lock:
            for item in fields(self):
                if not item.name.startswith("_"):
                    setattr(self, item.name, 0)

    def as_dict(self) -> dict[str, int]:
        return {item.name: getattr(self, item.name) for item in fields(self) if not item.name.startswith("_")}


def expansion_counter(counters: Counters) -> int:
    """Return the number of expansions recorded for a run."""

    return counters.expansions
