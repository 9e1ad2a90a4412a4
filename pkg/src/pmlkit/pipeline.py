"""End-to-end estimation: solve, round, rescale over candidate grids, discretize."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .allocation import AllocationMatrix, log_g
from .distribution import PseudoDistribution
from .errors import DomainError, EmptyGrid, Infeasible, NotIntegral, SparsifyUnsupported
from .grid import DiscretizationSet, build_grid, floor_to_grid, scale_grid
from .profile import Profile, log_c_phi
from .rounding import SwapTrace, create, is_integral, swap_matrix_round
from .solver import drop_zero_rows, solve_frac, sparsify

THREADS_ENV = "PMLKIT_THREADS"


@dataclass
class RunConfig:
    alpha: float = 1.0 / 3.0
    gap_tol: float = 1e-4
    max_iters: int = 5000
    seed: int = 0
    resolve_levels: bool = False
    max_scales: int = 200

    def __post_init__(self):
        if self.alpha <= 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if self.gap_tol <= 0 or self.max_iters < 1 or self.max_scales < 1:
            raise DomainError("tolerances and iteration budgets must be positive")


@dataclass
class PipelineResult:
    dist: PseudoDistribution
    x_final: AllocationMatrix
    log_objective: float
    scale: float
    swap_trace: SwapTrace = field(default_factory=SwapTrace, repr=False)

    @property
    def r_final(self) -> DiscretizationSet:
        return self.x_final.grid


@dataclass
class EstimateResult:
    distribution: PseudoDistribution
    scale: float
    log_objective: float
    winner: PipelineResult


def distribution_from_matrix(alloc: AllocationMatrix) -> PseudoDistribution:
    """Read off [X1]_i elements at level r_i; row sums must be integral."""
    rows = alloc.row_sums()
    if not np.all(np.abs(rows - np.round(rows)) <= 1e-8):
        raise NotIntegral("allocation has non-integral row sums")
    counts = np.round(rows).astype(int)
    return PseudoDistribution.from_pairs(
        (level, int(count))
        for level, count in zip(alloc.grid.levels, counts)
        if count >= 1
    )


def _fix_column0(x: np.ndarray) -> np.ndarray:
    """Shave the fractional part of column 0's sum off proportionally.

    Column 0 carries frequency zero, so this only loses bounded entropy
    mass and makes every column sum integral for the rounding stage.
    """
    out = np.array(x, dtype=float)
    total = float(out[:, 0].sum())
    if total <= 0.0 or is_integral(total):
        return out
    delta = total - math.floor(total)
    out[:, 0] *= 1.0 - delta / total
    return out


def approximate_pml(profile: Profile, grid: DiscretizationSet, cfg: RunConfig) -> PipelineResult:
    """Solve the relaxation, round to integral row sums, repair the levels."""
    if float(profile.phi.sum()) * grid.r_min > 1.0 + 1e-12:
        raise Infeasible("profile mass cannot fit on the grid")
    solved = solve_frac(profile, grid, gap_tol=cfg.gap_tol, max_iters=cfg.max_iters)
    try:
        slim = sparsify(solved.x)
    except SparsifyUnsupported:
        # More nonzero rows than k+1: proceed unreduced; the rounding loop
        # only pays for rows with fractional sums.
        slim = drop_zero_rows(solved.x)
    fixed = _fix_column0(slim.x)
    a_prime, b, trace = swap_matrix_round(fixed)
    x_final_arr, r_final = create(a_prime, b, slim.grid)
    alloc = AllocationMatrix(x_final_arr, r_final, profile)
    dist = distribution_from_matrix(alloc)
    log_objective = log_c_phi(profile) + log_g(alloc.x, alloc.cost)
    return PipelineResult(
        dist=dist,
        x_final=alloc,
        log_objective=log_objective,
        scale=1.0,
        swap_trace=trace,
    )


def rebalance_levels(alloc: AllocationMatrix) -> np.ndarray:
    """Per-row probability levels maximizing the linear term at fixed counts.

    r*_i = sum_j m_j X_ij / (n [X1]_i); the vector is rescaled so the total
    mass sum_i [X1]_i r*_i is exactly one.
    """
    rows = alloc.row_sums()
    if np.any(rows <= 0.0):
        raise DomainError("rebalancing needs strictly positive row sums")
    freqs = alloc.profile.freqs_with_zero.astype(float)
    r_star = (alloc.x @ freqs) / (alloc.profile.n * rows)
    total = float(rows @ r_star)
    if total > 0.0 and not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=1e-12):
        r_star = r_star / total
    return r_star


def discretize(result: PipelineResult, profile: Profile, grid: DiscretizationSet) -> PseudoDistribution:
    """Map the rounded solution onto the base grid via rebalanced levels.

    Observed rows move to their rebalanced optimum clamped into the grid's
    range; rows holding only unseen mass keep their current level.  Flooring
    onto the grid only shrinks levels, and unseen counts are truncated to
    whatever mass budget the observed rows leave, so the output never
    exceeds unit mass.
    """
    x = result.x_final.x
    levels = np.array(result.x_final.grid.levels)
    rows = x.sum(axis=1)
    keep = rows > 0.5
    if not np.any(keep):
        return PseudoDistribution(())
    sub = AllocationMatrix(x[keep], DiscretizationSet(tuple(levels[keep])), profile)
    r_star = rebalance_levels(sub)
    observed_mass = sub.x[:, 1:].sum(axis=1)
    counts = np.round(sub.row_sums()).astype(int)
    target = np.where(observed_mass > 1e-9, r_star, levels[keep])
    target = np.clip(target, grid.r_min, 1.0)
    total = float(counts @ target)
    if total > 1.0:
        target = np.clip(target / total, grid.r_min, 1.0)

    # Clamping levels up to the grid floor can overflow the unit budget when
    # the base grid is much coarser than the solution's levels.  Fit rows
    # greedily, rows with the most observed mass first, truncating counts;
    # the observed support itself always fits since n <= 2n^2 grid slots.
    order = sorted(
        range(len(counts)),
        key=lambda i: (-observed_mass[i] / max(counts[i], 1), target[i]),
    )
    pairs = []
    budget = 1.0
    for i in order:
        floored = floor_to_grid(grid, target[i])
        fit = min(int(counts[i]), int((budget + 1e-12) / floored))
        if fit >= 1:
            pairs.append((floored, fit))
            budget -= floored * fit
    return PseudoDistribution.from_pairs(pairs)


def _scale_candidates(profile: Profile, grid: DiscretizationSet, cfg: RunConfig) -> list[float]:
    beta = min(profile.k, grid.ell) / profile.n
    steps = math.ceil(math.log(1.0 / grid.r_min) / math.log1p(beta))
    steps = min(steps, cfg.max_scales - 1)
    return [(1.0 + beta) ** i for i in range(steps + 1)]


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def estimate(profile: Profile, cfg: RunConfig | None = None) -> EstimateResult:
    """Full estimator: try every feasible grid scaling, keep the best run.

    The candidate scalings form a geometric ladder with ratio
    1 + min(k, ell)/n from 1 up to 1/r_min (capped at max_scales entries);
    the run with the largest log objective wins, and its solution is
    discretized back onto the unscaled grid.
    """
    cfg = cfg or RunConfig()
    grid = build_grid(profile.n, cfg.alpha)

    def run_one(c: float) -> PipelineResult | None:
        try:
            scaled = scale_grid(grid, c)
        except EmptyGrid:
            return None
        try:
            result = approximate_pml(profile, scaled, cfg)
        except Infeasible:
            return None
        return replace(result, scale=c)

    candidates = _scale_candidates(profile, grid, cfg)
    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, candidates))
    else:
        results = [run_one(c) for c in candidates]

    winner: PipelineResult | None = None
    for result in results:
        if result is None:
            continue
        if winner is None or result.log_objective > winner.log_objective:
            winner = result
    if winner is None:
        raise Infeasible("no grid scaling admits the profile")

    if cfg.resolve_levels:
        refit_grid = DiscretizationSet(tuple(level for level, _ in winner.dist.entries))
        refit = approximate_pml(profile, refit_grid, cfg)
        winner = replace(refit, scale=winner.scale)

    distribution = discretize(winner, profile, grid)
    return EstimateResult(
        distribution=distribution,
        scale=winner.scale,
        log_objective=winner.log_objective,
        winner=winner,
    )
