"""Independent oracles shared across test modules.

These deliberately avoid the production code paths: the credit oracle
walks the tie rule value by value with plain Python lists, and the
goodness-of-fit helper only consumes the closed-form pmf/cdf it is
checking a sampler against.
"""

import numpy as np

from citesim.distribution import cdf, pmf


def credit_oracle(counts, x_percent):
    """Literal walk of the proportional tie-credit rule.

    Visits distinct values from the most cited down, granting each value
    block min(remaining slots, block size) credit shared equally.
    """
    counts = list(counts)
    remaining = x_percent / 100.0 * len(counts)
    credit_by_value = {}
    for value in sorted(set(counts), reverse=True):
        block = counts.count(value)
        take = min(max(remaining, 0.0), block)
        credit_by_value[value] = take / block
        remaining -= block
    return [credit_by_value[c] for c in counts]


def chi_square_gof(shifted_draws, params, top_bin=100):
    """Chi-square statistic/dof of draws against the closed-form pmf.

    Bins are {1, ..., top_bin} plus one tail bin for everything above.
    """
    shifted = np.asarray(shifted_draws)
    n = shifted.size
    ks = np.arange(1, top_bin + 1)
    expected = pmf(ks, params) * n
    tail_expected = (1.0 - cdf(top_bin, params)) * n
    observed = np.bincount(np.minimum(shifted, top_bin + 1), minlength=top_bin + 2)[1:]
    stat = float(((observed[:top_bin] - expected) ** 2 / expected).sum())
    stat += float((observed[top_bin] - tail_expected) ** 2 / tail_expected)
    return stat, top_bin
