"""Frank-Wolfe maximization of log g over the fractional allocation polytope.

The feasible set fixes every column sum j >= 1 to phi_j, leaves column 0
free, and couples everything through the single knapsack r^T X 1 <= 1.
Linear maximization over it reduces to a one-dimensional Lagrangian
bisection, which keeps each iteration cheap and exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .allocation import AllocationMatrix, _log_g_fast, cost_matrix, grad_log_g, log_g
from .errors import Infeasible, NonConvergence, SparsifyUnsupported
from .grid import DiscretizationSet
from .profile import Profile

FEAS_TOL = 1e-12
ROW_ZERO_TOL = 1e-9


@dataclass
class SolveResult:
    x: AllocationMatrix
    objective: float
    gap: float
    iterations: int
    objective_history: list[float] = field(default_factory=list)


def _column0_caps(levels: np.ndarray, phi_total: float) -> np.ndarray:
    # Any feasible point satisfies X_i0 <= (1 - r_min * sum(phi)) / r_i, so
    # capping column 0 there keeps the Lagrangian subproblem bounded without
    # shrinking the polytope.
    free = max(1.0 - levels[0] * phi_total, 0.0)
    return free / levels


def lmo(grad: np.ndarray, profile: Profile, grid: DiscretizationSet) -> np.ndarray:
    """argmax over the fractional polytope of <grad, V>.

    Columns j >= 1 put their phi_j units on the row maximizing
    grad_ij - lambda r_i; column 0 fills its cap wherever that score is
    positive.  The multiplier is found by bisection, then the knapsack is
    made tight by switching columns from the high- to the low-multiplier
    choice one at a time, splitting at most one column fractionally.
    """
    levels = grid.as_array()
    phi = profile.phi.astype(float)
    if phi.sum() * levels[0] > 1.0 + FEAS_TOL:
        raise Infeasible(
            f"minimum feasible mass {phi.sum() * levels[0]:.6g} exceeds 1"
        )
    caps = _column0_caps(levels, float(phi.sum()))
    cap_mass = levels * caps

    def structure(lam: float):
        scores = grad - lam * levels[:, None]
        rows = np.argmax(scores[:, 1:], axis=0)
        positive = scores[:, 0] > 0.0
        mass = float(levels[rows] @ phi + cap_mass[positive].sum())
        return rows, positive, mass

    def assemble(rows, positive) -> np.ndarray:
        v = np.zeros_like(grad)
        v[rows, np.arange(1, grad.shape[1])] = phi
        v[positive, 0] = caps[positive]
        return v

    rows0, pos0, mass0 = structure(0.0)
    if mass0 <= 1.0 + FEAS_TOL:
        return assemble(rows0, pos0)

    lam_hi = 1.0
    for _ in range(200):
        if structure(lam_hi)[2] <= 1.0:
            break
        lam_hi *= 2.0
    lam_lo = 0.0
    rows_lo, pos_lo, _ = structure(lam_lo)
    rows_hi, pos_hi, mass_hi = structure(lam_hi)
    for _ in range(80):
        if lam_hi - lam_lo <= 1e-12 * lam_hi:
            break
        mid = 0.5 * (lam_lo + lam_hi)
        if mid in (lam_lo, lam_hi):
            break
        rows_mid, pos_mid, mass_mid = structure(mid)
        if mass_mid <= 1.0:
            lam_hi, rows_hi, pos_hi, mass_hi = mid, rows_mid, pos_mid, mass_mid
        else:
            lam_lo, rows_lo, pos_lo = mid, rows_mid, pos_mid

    v = assemble(rows_hi, pos_hi)
    slack = 1.0 - mass_hi
    if slack <= FEAS_TOL:
        return v

    # At the crossing multiplier both variants are Lagrangian-optimal, so any
    # interpolation consuming the slack is optimal for the original LP.
    for idx in range(len(phi)):
        j = idx + 1
        if rows_hi[idx] == rows_lo[idx] or slack <= FEAS_TOL:
            continue
        delta = (levels[rows_lo[idx]] - levels[rows_hi[idx]]) * phi[idx]
        if delta <= FEAS_TOL:
            continue
        if delta <= slack:
            v[rows_hi[idx], j] = 0.0
            v[rows_lo[idx], j] = phi[idx]
            slack -= delta
        else:
            theta = slack / delta
            v[rows_hi[idx], j] = (1.0 - theta) * phi[idx]
            v[rows_lo[idx], j] = theta * phi[idx]
            slack = 0.0
    if slack > FEAS_TOL:
        for i in np.flatnonzero(pos_lo):
            if slack <= FEAS_TOL:
                break
            room = caps[i] - v[i, 0]
            if room <= 0.0:
                continue
            add = min(room, slack / levels[i])
            v[i, 0] += add
            slack -= add * levels[i]
    return v


def _golden_section_max(f, iters: int = 40) -> float:
    """Deterministic golden-section maximization over [0, 1]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = 0.0, 1.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _spread_weights(levels: np.ndarray, phi_total: float) -> np.ndarray:
    """Inverse-level row weights blended toward the cheapest row until the
    per-unit mass budget 1/sum(phi) holds."""
    budget = 1.0 / phi_total
    harmonic = (1.0 / levels) / float((1.0 / levels).sum())
    mass_h = float(levels @ harmonic)
    if mass_h <= budget:
        return harmonic
    base = np.zeros_like(levels)
    base[0] = 1.0
    tau = 0.5 * (budget - levels[0]) / (mass_h - levels[0])
    tau = min(max(tau, 0.0), 1.0)
    return (1.0 - tau) * base + tau * harmonic


def _initial_point(profile: Profile, grid: DiscretizationSet) -> np.ndarray:
    """Strictly interior start anchored at the empirical rates.

    Each frequency column concentrates near the grid level just below
    m_j / n, blended with a spread row distribution to stay interior; the
    blend weight is capped so the knapsack keeps slack, and column 0 tops
    the total mass up to one.
    """
    levels = grid.as_array()
    phi = profile.phi.astype(float)
    phi_total = float(phi.sum())
    rates = np.clip(profile.m.astype(float) / profile.n, levels[0], levels[-1])
    anchors = np.maximum(np.searchsorted(levels, rates, side="right") - 1, 0)

    w = _spread_weights(levels, phi_total)
    base_mass = float(phi @ np.full(profile.k, levels @ w))
    anchor_mass = float(phi @ levels[anchors])
    target = 0.98
    if anchor_mass > base_mass:
        theta = min(0.9, max(0.0, (target - base_mass) / (anchor_mass - base_mass)))
    else:
        theta = 0.9

    x = np.zeros((grid.ell, profile.k + 1))
    x[:, 1:] = (1.0 - theta) * np.outer(w, phi)
    x[anchors, np.arange(1, profile.k + 1)] += theta * phi
    used = float(levels @ x.sum(axis=1))
    free = 1.0 - used
    if free > 0.0:
        x[:, 0] = w * (free / float(levels @ w))
    return x


def solve_frac(
    profile: Profile,
    grid: DiscretizationSet,
    gap_tol: float = 1e-4,
    max_iters: int = 5000,
) -> SolveResult:
    """Maximize log g over the fractional polytope with a gap certificate.

    Stops once the Frank-Wolfe gap <grad, V* - X> falls below
    max(gap_tol, 0.01 * min(k, ell) * log n), the additive slack the
    downstream approximation budget already tolerates.  Deterministic:
    fixed initialization, golden-section line search.
    """
    levels = grid.as_array()
    phi = profile.phi.astype(float)
    if phi.sum() * levels[0] > 1.0 + FEAS_TOL:
        raise Infeasible("profile cannot fit the grid's minimum mass")

    cost = cost_matrix(grid, profile)
    x = _initial_point(profile, grid)
    objective = log_g(x, cost)
    history = [objective]
    threshold = max(gap_tol, 0.01 * min(profile.k, grid.ell) * math.log(profile.n))

    gap = float("inf")
    iterations = 0
    for iterations in range(1, max_iters + 1):
        grad = grad_log_g(x, cost)
        v = lmo(grad, profile, grid)
        gap = max(float((grad * (v - x)).sum()), 0.0)
        if gap <= threshold:
            break
        direction = v - x

        def line_obj(gamma: float) -> float:
            return _log_g_fast(x + gamma * direction, cost)

        gamma = _golden_section_max(line_obj)
        candidates = [(line_obj(gamma), gamma), (line_obj(1.0), 1.0)]
        best_obj, best_gamma = max(candidates)
        if best_obj <= objective:
            break  # no numerically productive step remains
        x = np.maximum(x + best_gamma * direction, 0.0)
        objective = best_obj
        history.append(objective)
    else:
        raise NonConvergence(
            f"gap {gap:.3g} above threshold {threshold:.3g} after {max_iters} iterations",
            gap=gap,
        )

    alloc = AllocationMatrix(x, grid, profile)
    return SolveResult(
        x=alloc,
        objective=objective,
        gap=gap,
        iterations=iterations,
        objective_history=history,
    )


def drop_zero_rows(alloc: AllocationMatrix) -> AllocationMatrix:
    """Remove rows with vanished sums, shrinking the grid to match.

    Numerical dust from a dropped row is folded into the largest surviving
    entry of its column so column sums are preserved exactly.
    """
    x = alloc.x.copy()
    alive = x.sum(axis=1) > ROW_ZERO_TOL
    if not np.any(alive):
        raise SparsifyUnsupported("allocation matrix is entirely zero")
    dead = ~alive
    if np.any(dead):
        leftovers = x[dead].sum(axis=0)
        kept = x[alive]
        for j in np.flatnonzero(leftovers > 0.0):
            kept[np.argmax(kept[:, j]), j] += leftovers[j]
        x = kept
    else:
        x = x[alive]
    levels = tuple(r for r, keep in zip(alloc.grid.levels, alive) if keep)
    return AllocationMatrix(x, DiscretizationSet(levels), alloc.profile)


def sparsify(alloc: AllocationMatrix) -> AllocationMatrix:
    """Drop zero rows; the result must fit in k+1 rows.

    The reduction of solutions that stay dense across more than k+1 rows is
    out of scope, so those raise instead of silently losing mass.
    """
    slim = drop_zero_rows(alloc)
    if slim.grid.ell > alloc.profile.k + 1:
        raise SparsifyUnsupported(
            f"{slim.grid.ell} nonzero rows exceed k+1={alloc.profile.k + 1}"
        )
    return slim
