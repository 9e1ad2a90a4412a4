"""Allocation matrices, the log g objective, and its gradient.

An allocation matrix X is ell x (k+1): row i corresponds to probability
level r_i of an attached grid, column j >= 1 to observed frequency m_j,
and column 0 to unseen elements (frequency 0).  X_ij counts (possibly
fractionally) how many domain elements sit at level r_i with frequency m_j.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError
from .grid import DiscretizationSet
from .profile import Profile

# Entries below this are treated as exact zeros in entropy terms.
ZERO_ENTRY = 1e-300
# Gradient evaluation clamps entries here to keep log ratios finite.
GRAD_CLAMP = 1e-12


def xlogx(v: np.ndarray) -> np.ndarray:
    """Elementwise x log x with the 0 log 0 = 0 convention."""
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    mask = v > ZERO_ENTRY
    out[mask] = v[mask] * np.log(v[mask])
    return out


def row_entropy_term(v) -> float:
    """f(v) = (sum v) log(sum v) - sum v log v, nonnegative for v >= 0."""
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise DomainError("negative entry in entropy term")
    total = float(v.sum())
    head = total * np.log(total) if total > ZERO_ENTRY else 0.0
    return float(head - xlogx(v).sum())


def cost_matrix(grid: DiscretizationSet, profile: Profile) -> np.ndarray:
    """C_ij = m_j log r_i with column 0 identically zero (m_0 = 0)."""
    log_r = np.log(grid.as_array())
    freqs = profile.freqs_with_zero.astype(float)
    return np.outer(log_r, freqs)


def _log_g_fast(x: np.ndarray, cost: np.ndarray) -> float:
    """Unvalidated objective evaluation; entries below ZERO_ENTRY act as 0."""
    rows = x.sum(axis=1)
    entropy_entries = np.einsum("ij,ij->", x, np.log(np.maximum(x, ZERO_ENTRY)))
    entropy_rows = rows @ np.log(np.maximum(rows, ZERO_ENTRY))
    return float(np.einsum("ij,ij->", cost, x) - entropy_entries + entropy_rows)


def log_g(x: np.ndarray, cost: np.ndarray) -> float:
    """Objective sum_ij [C_ij X_ij - X_ij log X_ij] + sum_i [X1]_i log [X1]_i.

    Everything stays in log space; g itself is never materialized.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != cost.shape:
        raise ShapeError(f"matrix shape {x.shape} does not match cost shape {cost.shape}")
    if np.any(x < 0):
        raise DomainError("allocation entries must be nonnegative")
    return _log_g_fast(x, cost)


def grad_log_g(x: np.ndarray, cost: np.ndarray) -> np.ndarray:
    """Gradient C_ij + log([X1]_i / X_ij), entries clamped at GRAD_CLAMP."""
    x = np.asarray(x, dtype=float)
    if x.shape != cost.shape:
        raise ShapeError(f"matrix shape {x.shape} does not match cost shape {cost.shape}")
    clamped = np.maximum(x, GRAD_CLAMP)
    rows = np.maximum(x.sum(axis=1), GRAD_CLAMP)
    return cost + np.log(rows[:, None] / clamped)


@dataclass
class AllocationMatrix:
    """An allocation matrix together with its grid and profile context."""

    x: np.ndarray
    grid: DiscretizationSet
    profile: Profile
    _cost: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        expected = (self.grid.ell, self.profile.k + 1)
        if self.x.shape != expected:
            raise ShapeError(f"allocation shape {self.x.shape}, expected {expected}")
        if np.any(self.x < 0):
            raise DomainError("allocation entries must be nonnegative")

    @property
    def cost(self) -> np.ndarray:
        if self._cost is None:
            self._cost = cost_matrix(self.grid, self.profile)
        return self._cost

    def log_g(self) -> float:
        return log_g(self.x, self.cost)

    def grad_log_g(self) -> np.ndarray:
        return grad_log_g(self.x, self.cost)

    def row_sums(self) -> np.ndarray:
        return self.x.sum(axis=1)

    def column_sums(self) -> np.ndarray:
        return self.x.sum(axis=0)

    def mass(self) -> float:
        return float(self.grid.as_array() @ self.row_sums())

    def to_json(self) -> str:
        return json.dumps(
            {
                "levels": list(self.grid.levels),
                "freqs": [int(f) for f in self.profile.freqs_with_zero],
                "rows": self.x.tolist(),
            }
        )


def check_frac_feasible(alloc: AllocationMatrix, tol: float = 1e-8) -> bool:
    """Column sums match phi for j >= 1 and total mass is at most 1.

    Column 0 is unconstrained apart from nonnegativity.
    """
    cols = alloc.column_sums()
    if np.any(np.abs(cols[1:] - alloc.profile.phi) > tol):
        return False
    return alloc.mass() <= 1.0 + tol


def check_integral_feasible(alloc: AllocationMatrix, tol: float = 1e-8) -> bool:
    """Fractional feasibility plus integral nonnegative row sums."""
    if not check_frac_feasible(alloc, tol):
        return False
    rows = alloc.row_sums()
    return bool(np.all(np.abs(rows - np.round(rows)) <= tol) and np.all(np.round(rows) >= 0))
