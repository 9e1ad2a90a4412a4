"""Shared generators for randomized tests."""

import numpy as np

from pmlkit import DiscretizationSet, profile_from_counts


def column_integral_matrix(rng, s, t, scale=2.0):
    """Random nonnegative s x t matrix with every column sum an integer."""
    a = rng.random((s, t)) * scale
    for j in range(t):
        cs = a[:, j].sum()
        target = max(round(cs), 0)
        if cs > 0:
            a[:, j] *= target / cs
    return a


def random_context(rng, s, t):
    """Ascending levels and frequencies for an s x t objective context."""
    levels = np.sort(rng.random(s) * 0.9 + 0.05)
    freqs = np.concatenate(([0], np.sort(rng.choice(np.arange(1, 50), size=t - 1, replace=False))))
    return levels, freqs.astype(float)


def tiny_instance(rng, max_levels=3, max_freqs=2):
    """A small feasible (profile, grid) pair for solver tests."""
    while True:
        ell = int(rng.integers(1, max_levels + 1))
        k = int(rng.integers(1, max_freqs + 1))
        levels = np.sort(rng.random(ell) * 0.6 + 0.05)
        phis = [int(rng.integers(1, 4)) for _ in range(k)]
        if sum(phis) * levels[0] <= 1.0:
            profile = profile_from_counts([(j + 1, phis[j]) for j in range(k)])
            return profile, DiscretizationSet(tuple(levels))


def feasible_scan(rng, profile, grid, cost, n_points):
    """Best log g over random feasible points; brute-force reference."""
    from pmlkit.allocation import log_g

    ell = grid.ell
    levels = grid.as_array()
    phis = profile.phi.astype(float)
    best = -np.inf
    for _ in range(n_points):
        x = np.zeros((ell, profile.k + 1))
        for j in range(profile.k):
            w = rng.random(ell) ** 2
            x[:, j + 1] = phis[j] * w / w.sum()
        used = levels @ x.sum(axis=1)
        if used > 1.0:
            continue
        x[:, 0] = rng.random(ell) * (1.0 - used) / (levels * ell)
        best = max(best, log_g(x, cost))
    return best
