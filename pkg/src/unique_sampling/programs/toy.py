"""A small program over binary sequences of length one to three."""

from __future__ import annotations

from unique_sampling.choice import ChoiceSource, make_distribution

__all__ = ["FINAL_DISTRIBUTION", "LENGTH_DISTRIBUTION", "TOKEN_DISTRIBUTION", "toy_program"]

LENGTH_DISTRIBUTION = make_distribution([0.5, 0.4, 0.1])
TOKEN_DISTRIBUTION = make_distribution([0.75, 0.25])
FINAL_DISTRIBUTION = make_distribution([0.1, 0.9])


def toy_program(choice: ChoiceSource) -> tuple[int, ...]:
    """Draw a length, that many tokens, then one final token.

    The program has 14 complete traces; trace ``(1, 0, 1)`` yields ``(0, 1)``
    with probability ``0.4 * 0.75 * 0.9 = 0.27``.
    """

    length = choice.choose(LENGTH_DISTRIBUTION)
    tokens = [choice.choose(TOKEN_DISTRIBUTION) for _ in range(length)]
    tokens.append(choice.choose(FINAL_DISTRIBUTION))
    return tuple(tokens)
