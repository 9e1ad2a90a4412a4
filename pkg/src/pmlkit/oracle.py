"""Exact ground truth for tiny instances: profile probabilities and discrete PML.

Everything here is exponential-time enumeration, guarded by an explicit
budget.  These routines exist to check the fast path, not to scale.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .distribution import PseudoDistribution
from .errors import BudgetExceeded
from .grid import DiscretizationSet
from .profile import Profile, log_c_phi, profile_from_counts


@dataclass(frozen=True)
class OracleBudget:
    max_domain: int = 5
    max_n: int = 8
    max_states: int = 10**7

    def __post_init__(self):
        if self.max_domain < 1 or self.max_n < 1 or self.max_states < 1:
            raise BudgetExceeded("budget limits must be positive")


DEFAULT_BUDGET = OracleBudget()


def _prob_by_sequences(probs: np.ndarray, profile: Profile) -> float:
    """Sum P(sequence) over every length-n sequence whose profile matches."""
    domain = range(len(probs))
    target = dict(profile.freqs)
    total = 0.0
    for seq in itertools.product(domain, repeat=profile.n):
        freq = Counter(seq)
        if Counter(freq.values()) == target:
            prod = 1.0
            for x, f in freq.items():
                prod *= probs[x] ** f
            total += prod
    return total


def _prob_by_assignments(probs: np.ndarray, profile: Profile) -> float:
    """Sum over disjoint assignments of frequency classes to domain elements.

    Every sequence with the right profile factors as a choice of which
    elements carry which frequency, times the same multinomial coefficient,
    so P(p, phi) = C_phi * sum over assignments of prod p_x^{m_j}.
    """
    ms = [m for m, _ in profile.freqs]
    phis = [phi for _, phi in profile.freqs]

    def recurse(j: int, remaining: frozenset) -> float:
        if j == len(ms):
            return 1.0
        total = 0.0
        for subset in itertools.combinations(sorted(remaining), phis[j]):
            weight = 1.0
            for x in subset:
                weight *= probs[x] ** ms[j]
            if weight > 0.0:
                total += weight * recurse(j + 1, remaining - frozenset(subset))
        return total

    coeff = math.exp(log_c_phi(profile))
    return coeff * recurse(0, frozenset(range(len(probs))))


def _assignment_states(domain: int, profile: Profile) -> float:
    states = 1.0
    left = domain
    for _, phi in profile.freqs:
        if phi > left:
            return 0.0
        states *= math.comb(left, phi)
        left -= phi
    return states


def exact_profile_prob(
    probs, profile: Profile, budget: OracleBudget = DEFAULT_BUDGET
) -> float:
    """Exact log P(p, phi) for an explicit element-probability vector.

    Small domains enumerate all |D|^n sequences directly; otherwise the
    assignment sum is used, which only enumerates which elements carry which
    frequency class.
    """
    probs = np.asarray(probs, dtype=float)
    if profile.n > budget.max_n:
        raise BudgetExceeded(f"n={profile.n} exceeds budget max_n={budget.max_n}")
    domain = len(probs)
    if profile.distinct_observed() > domain:
        return float("-inf")
    n_sequences = float(domain) ** profile.n
    if n_sequences <= 1e5:
        value = _prob_by_sequences(probs, profile)
    else:
        if domain > budget.max_domain and _assignment_states(domain, profile) > budget.max_states:
            raise BudgetExceeded(f"domain {domain} too large for the state budget")
        value = _prob_by_assignments(probs, profile)
    return math.log(value) if value > 0.0 else float("-inf")


def _count_multisets(n_levels: int, max_domain: int) -> int:
    return sum(math.comb(n_levels + d - 1, d) for d in range(1, max_domain + 1))


def exact_discrete_pml(
    profile: Profile, grid: DiscretizationSet, budget: OracleBudget = DEFAULT_BUDGET
) -> tuple[PseudoDistribution, float]:
    """Maximize log P(q/||q||_1, phi) over enumerable discrete pseudo-distributions.

    Candidates are all level multisets of size up to the domain budget with
    total mass at most one.  Ties resolve to the lexicographically smallest
    level multiset so reruns are reproducible.
    """
    if profile.n > budget.max_n:
        raise BudgetExceeded(f"n={profile.n} exceeds budget max_n={budget.max_n}")
    if _count_multisets(grid.ell, budget.max_domain) > budget.max_states:
        raise BudgetExceeded("level multiset enumeration exceeds the state budget")

    eval_budget = OracleBudget(
        max_domain=max(budget.max_domain, grid.ell * budget.max_domain),
        max_n=budget.max_n,
        max_states=budget.max_states,
    )
    best_value = float("-inf")
    best_levels: tuple[float, ...] | None = None
    for size in range(1, budget.max_domain + 1):
        for levels in itertools.combinations_with_replacement(grid.levels, size):
            mass = sum(levels)
            if mass > 1.0 + 1e-12:
                continue
            dist = PseudoDistribution.from_pairs(Counter(levels).items())
            value = exact_profile_prob(dist.normalize().expand(), profile, eval_budget)
            # Ties (equal normalized distributions) resolve to the largest
            # mass, then the lexicographically smallest level multiset.
            if best_levels is None:
                better = value > best_value
            elif value > best_value + 1e-12:
                better = True
            elif value < best_value - 1e-12:
                better = False
            else:
                best_mass = sum(best_levels)
                better = mass > best_mass + 1e-12 or (
                    abs(mass - best_mass) <= 1e-12 and levels < best_levels
                )
            if better:
                best_value = value
                best_levels = levels
    if best_levels is None:
        raise BudgetExceeded("no feasible candidate distribution")
    return PseudoDistribution.from_pairs(Counter(best_levels).items()), best_value


def iter_profiles(n: int):
    """Yield every profile of length n (one per integer partition of n)."""

    def partitions(remaining: int, cap: int):
        if remaining == 0:
            yield []
            return
        for part in range(min(remaining, cap), 0, -1):
            for rest in partitions(remaining - part, part):
                yield [part] + rest

    for parts in partitions(n, n):
        yield profile_from_counts(sorted(Counter(parts).items()))
