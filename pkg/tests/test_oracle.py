import math

import numpy as np
import pytest

from pmlkit import (
    DiscretizationSet,
    OracleBudget,
    PseudoDistribution,
    build_profile,
    exact_discrete_pml,
    exact_profile_prob,
    iter_profiles,
    profile_from_counts,
)
from pmlkit.errors import BudgetExceeded
from pmlkit.oracle import _prob_by_assignments, _prob_by_sequences


def test_two_singletons_probability():
    profile = build_profile(["a", "b"])
    assert exact_profile_prob(np.array([0.5, 0.5]), profile) == pytest.approx(math.log(0.5))


def test_point_mass_probability():
    profile = profile_from_counts([(4, 1)])
    assert exact_profile_prob(np.array([1.0]), profile) == pytest.approx(0.0, abs=1e-12)


def test_profile_needs_enough_elements():
    profile = build_profile(["a", "b", "c"])
    assert exact_profile_prob(np.array([0.6, 0.4]), profile) == float("-inf")


def test_sequence_and_assignment_paths_agree():
    rng = np.random.default_rng(40)
    for _ in range(40):
        d = int(rng.integers(1, 5))
        n = int(rng.integers(1, 7))
        probs = rng.random(d)
        probs /= probs.sum() / rng.uniform(0.5, 1.0)
        profile = build_profile([str(t) for t in rng.integers(0, d, size=n)])
        a = _prob_by_sequences(probs, profile)
        b = _prob_by_assignments(probs, profile)
        assert b == pytest.approx(a, abs=1e-12, rel=1e-12)


def test_probabilities_sum_to_one_over_profiles():
    rng = np.random.default_rng(41)
    for _ in range(5):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(2, 7))
        p = rng.random(d)
        p /= p.sum()
        total = sum(
            math.exp(lp)
            for prof in iter_profiles(n)
            if (lp := exact_profile_prob(p, prof)) > float("-inf")
        )
        assert total == pytest.approx(1.0, abs=1e-10)


def test_probability_symmetric_in_elements():
    rng = np.random.default_rng(42)
    profile = build_profile(["a", "a", "b", "c"])
    for _ in range(20):
        p = rng.random(4)
        p /= p.sum()
        base = exact_profile_prob(p, profile)
        assert exact_profile_prob(p[::-1], profile) == pytest.approx(base, abs=1e-12)


def test_budget_rejects_large_n():
    profile = profile_from_counts([(1, 9)])
    with pytest.raises(BudgetExceeded):
        exact_profile_prob(np.full(9, 0.1), profile, OracleBudget(max_n=8))


def test_pml_two_singletons_prefers_wide_support():
    profile = build_profile(["a", "b"])
    grid = DiscretizationSet((0.3, 0.45, 0.5, 0.55))
    dist, log_p = exact_discrete_pml(profile, grid, OracleBudget(max_domain=4, max_n=4))
    # three elements near 1/3 beat uniform-on-two: collision probability drops
    assert dist.entries == ((0.3, 3),)
    assert math.exp(log_p) == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_pml_point_mass():
    profile = profile_from_counts([(3, 1)])
    dist, log_p = exact_discrete_pml(profile, DiscretizationSet((0.5, 1.0)), OracleBudget())
    assert dist.entries == ((1.0, 1),)
    assert log_p == pytest.approx(0.0, abs=1e-12)


def test_pml_beats_manual_candidates():
    rng = np.random.default_rng(43)
    profile = build_profile(["a", "a", "b"])
    grid = DiscretizationSet((0.2, 0.4, 0.6, 0.8, 1.0))
    _, log_best = exact_discrete_pml(profile, grid, OracleBudget(max_domain=4))
    budget = OracleBudget(max_domain=8)
    for _ in range(50):
        size = int(rng.integers(1, 5))
        levels = rng.choice(grid.levels, size=size, replace=True)
        if levels.sum() > 1.0:
            continue
        cand = PseudoDistribution.from_pairs((lv, 1) for lv in set(levels))
        value = exact_profile_prob(cand.normalize().expand(), profile, budget)
        assert value <= log_best + 1e-12


def test_pml_budget_guard():
    profile = build_profile(["a", "b"])
    grid = DiscretizationSet(tuple(np.linspace(0.01, 1.0, 60)))
    with pytest.raises(BudgetExceeded):
        exact_discrete_pml(profile, grid, OracleBudget(max_domain=5, max_states=1000))


def test_iter_profiles_counts_partitions():
    # seven partitions of 5 map to seven profiles
    profiles = list(iter_profiles(5))
    assert len(profiles) == 7
    assert all(p.n == 5 for p in profiles)
    assert len(set(profiles)) == 7
