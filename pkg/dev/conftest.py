import numpy as np
import pytest

from unique_sampling.programs import ExplicitProgram


def random_explicit_program(rng: np.random.Generator, *, max_depth: int = 3, max_branching: int = 3) -> ExplicitProgram:
    """A random prefix-free program with Dirichlet branch probabilities and uneven depth."""

    traces: dict[tuple[int, ...], float] = {}

    def grow(prefix: tuple[int, ...], probability: float) -> None:
        if prefix and (len(prefix) == max_depth or rng.random() < 0.3):
            traces[prefix] = probability
            return
        branching = int(rng.integers(1, max_branching + 1))
        for index, weight in enumerate(rng.dirichlet(np.ones(branching))):
            grow((*prefix, index), probability * float(weight))

    grow((), 1.0)
    return ExplicitProgram(traces)


@pytest.fixture
def fuzz_programs():
    def make(count: int, seed: int) -> list[ExplicitProgram]:
        rng = np.random.default_rng(seed)
        return [random_explicit_program(rng) for _ in range(count)]

    return make


@pytest.fixture
def two_level():
    return ExplicitProgram(
        {
            (0, 0): 0.5 * 0.6,
            (0, 1): 0.5 * 0.4,
            (1, 0): 0.3 * 0.6,
            (1, 1): 0.3 * 0.4,
            (2, 0): 0.2 * 0.6,
            (2, 1): 0.2 * 0.4,
        }
    )
