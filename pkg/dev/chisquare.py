from collections import Counter
from collections.abc import Hashable, Iterable, Mapping

import numpy as np
from scipy import stats

MIN_EXPECTED = 5.0
SIGNIFICANCE = 1e-4


def pooled_chisquare(observed: Iterable[Hashable], expected: Mapping[Hashable, float]) -> float:
    """Chi-square p-value of ``observed`` outcomes against ``expected`` probabilities.

    Outcomes with an expected count below five are pooled into one bin.
    An outcome missing from ``expected`` fails the test outright.
    """

    counts = Counter(observed)
    unexpected = set(counts) - set(expected)
    assert not unexpected, f"outcomes with zero probability: {sorted(map(repr, unexpected))[:5]}"
    n = sum(counts.values())

    f_obs: list[float] = []
    f_exp: list[float] = []
    pooled_obs = pooled_exp = 0.0
    for outcome, probability in expected.items():
        if probability * n < MIN_EXPECTED:
            pooled_obs += counts[outcome]
            pooled_exp += probability * n
        else:
            f_obs.append(counts[outcome])
            f_exp.append(probability * n)
    if pooled_exp > 0.0:
        f_obs.append(pooled_obs)
        f_exp.append(pooled_exp)
    if len(f_obs) < 2:
        return 1.0

    expected_counts = np.asarray(f_exp)
    expected_counts *= n / expected_counts.sum()
    return float(stats.chisquare(np.asarray(f_obs), expected_counts).pvalue)
