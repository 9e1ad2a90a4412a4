"""Swap-based matrix rounding with exact marginal preservation.

All operations act on nonnegative matrices whose rows correspond to
ascending probability levels and whose columns correspond to ascending
frequencies (column 0 = unseen).  Indices are 0-based throughout; block
ranges are inclusive and a range with start > end is empty.

The one primitive is ``swap``: a four-entry +/- epsilon perturbation that
leaves every row and column sum unchanged.  Everything else is built from
it, so marginals survive the whole pipeline by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CreatePreconditionError,
    RoundPreconditionError,
    SwapInfeasible,
    TransInfeasible,
)
from .grid import DiscretizationSet

INT_TOL = 1e-9  # sums within this of an integer are snapped exactly


def _agg_tol(dim: int) -> float:
    # Each processed row can leave a little numerical dust behind, so
    # integrality checks on sums aggregated across rows get flat headroom
    # plus a per-row term.  Outputs stay as exact as the swap arithmetic;
    # this only loosens internal sanity raises.
    return 1e-6 + INT_TOL * dim


def is_integral(x: float, tol: float = INT_TOL) -> bool:
    return abs(x - round(x)) <= tol


def snap_int(x: float, tol: float = INT_TOL) -> int:
    if not is_integral(x, tol):
        raise RoundPreconditionError(f"{x} is not within {tol} of an integer")
    return int(round(x))


def _floor_snapped(x: float, tol: float = INT_TOL) -> int:
    return int(round(x)) if is_integral(x, tol) else int(np.floor(x))


def _ceil_snapped(x: float, tol: float = INT_TOL) -> int:
    return int(round(x)) if is_integral(x, tol) else int(np.ceil(x))


@dataclass
class SwapTrace:
    """Ordered record of swap operations with their total epsilon."""

    ops: list[tuple[int, int, int, int, float]] = field(default_factory=list)

    @property
    def total(self) -> float:
        return float(sum(op[4] for op in self.ops))

    def append(self, i1: int, i2: int, j1: int, j2: int, eps: float) -> None:
        self.ops.append((i1, i2, j1, j2, float(eps)))

    def extend(self, other: "SwapTrace") -> None:
        self.ops.extend(other.ops)

    def __len__(self) -> int:
        return len(self.ops)

    def to_json(self) -> str:
        return json.dumps(
            [
                {"i1": i1, "i2": i2, "j1": j1, "j2": j2, "eps": eps}
                for i1, i2, j1, j2, eps in self.ops
            ]
        )


def swap(a: np.ndarray, i1: int, i2: int, j1: int, j2: int, eps: float) -> np.ndarray:
    """Add eps at (i1,j1) and (i2,j2), remove it at (i1,j2) and (i2,j1)."""
    if not (0 <= i1 < i2 < a.shape[0] and 0 <= j1 < j2 < a.shape[1]):
        raise SwapInfeasible(f"bad swap indices ({i1},{i2},{j1},{j2}) for shape {a.shape}")
    if eps < 0:
        raise SwapInfeasible(f"negative swap amount {eps}")
    if a[i1, j2] < eps - INT_TOL or a[i2, j1] < eps - INT_TOL:
        raise SwapInfeasible("swap would drive an entry negative")
    out = np.array(a, dtype=float)
    _swap_inplace(out, i1, i2, j1, j2, eps)
    return out


def _swap_inplace(a: np.ndarray, i1: int, i2: int, j1: int, j2: int, eps: float) -> None:
    a[i1, j1] += eps
    a[i2, j2] += eps
    a[i1, j2] = max(a[i1, j2] - eps, 0.0)
    a[i2, j1] = max(a[i2, j1] - eps, 0.0)


def _block_entries(a, rows, cols, order):
    """Yield (i, j) over an inclusive block; 'row' scans row-major, 'col' column-major."""
    r0, r1 = rows
    c0, c1 = cols
    if order == "row":
        for i in range(r0, r1 + 1):
            for j in range(c0, c1 + 1):
                yield i, j
    else:
        for j in range(c0, c1 + 1):
            for i in range(r0, r1 + 1):
                yield i, j


def _block_sum(a, rows, cols) -> float:
    r0, r1 = rows
    c0, c1 = cols
    if r0 > r1 or c0 > c1:
        return 0.0
    return float(a[r0 : r1 + 1, c0 : c1 + 1].sum())


def _trans_inplace(a, v, blocks, trace, upper_order="row"):
    """Shift block mass by v using swaps; see ``trans`` for the contract."""
    i1, i2, i3, i4, j1, j2, j3, j4 = blocks
    if not (i1 <= i2 + 1 <= i3 <= i4 + 1 and j1 <= j2 + 1 <= j3 <= j4 + 1):
        raise TransInfeasible(f"block ranges {blocks} are not ordered")
    if v < -INT_TOL:
        raise TransInfeasible(f"negative transfer amount {v}")
    lower_left = _block_sum(a, (i3, i4), (j1, j2))
    upper_right = _block_sum(a, (i1, i2), (j3, j4))
    if v > min(lower_left, upper_right) + 1e-9:
        raise TransInfeasible(
            f"transfer {v} exceeds available block mass {min(lower_left, upper_right)}"
        )
    remaining = float(v)
    if remaining <= 0.0:
        return
    donors = _block_entries(a, (i3, i4), (j1, j2), "row")
    receivers = _block_entries(a, (i1, i2), (j3, j4), upper_order)
    donor = receiver = None
    dust = 1e-15
    while remaining > dust:
        while donor is None or a[donor] <= dust:
            donor = next(donors, None)
            if donor is None:
                if remaining <= 1e-9 * max(1.0, v):
                    return
                raise TransInfeasible("ran out of donor mass mid-transfer")
        while receiver is None or a[receiver] <= dust:
            receiver = next(receivers, None)
            if receiver is None:
                if remaining <= 1e-9 * max(1.0, v):
                    return
                raise TransInfeasible("ran out of receiver mass mid-transfer")
        c, b = donor
        arow, d = receiver
        u = min(a[c, b], a[arow, d], remaining)
        _swap_inplace(a, arow, c, b, d, u)
        trace.append(arow, c, b, d, u)
        remaining -= u
        if a[c, b] <= dust:
            donor = None
        if a[arow, d] <= dust:
            receiver = None


def trans(x: np.ndarray, v: float, blocks: tuple) -> tuple[np.ndarray, SwapTrace]:
    """Move v units of block mass via swaps.

    ``blocks = (i1, i2, i3, i4, j1, j2, j3, j4)`` names two inclusive row
    ranges and two inclusive column ranges with i1 <= i2+1 <= i3 <= i4+1 and
    j1 <= j2+1 <= j3 <= j4+1.  The block sums over (i1..i2, j1..j2) and
    (i3..i4, j3..j4) grow by exactly v, the two off blocks shrink by v, and
    entries outside the four blocks are untouched.
    """
    out = np.array(x, dtype=float)
    trace = SwapTrace()
    _trans_inplace(out, v, blocks, trace)
    return out, trace


def split(x: np.ndarray, t: int) -> np.ndarray:
    """Split row t at its integral prefix: first part sums to floor(row sum).

    Returns a matrix with one extra row; ``combine`` undoes it exactly.
    """
    x = np.asarray(x, dtype=float)
    row = x[t]
    total = float(row.sum())
    floor_total = _floor_snapped(total)
    prefix = 0.0
    s_col = x.shape[1] - 1
    for j in range(x.shape[1]):
        prefix += row[j]
        if prefix >= floor_total - INT_TOL:
            s_col = j
            break
    head = np.zeros_like(row)
    tail = np.zeros_like(row)
    head[:s_col] = row[:s_col]
    head[s_col] = min(max(floor_total - float(row[:s_col].sum()), 0.0), row[s_col])
    tail[s_col] = row[s_col] - head[s_col]
    tail[s_col + 1 :] = row[s_col + 1 :]
    return np.vstack([x[:t], head[None, :], tail[None, :], x[t + 1 :]])


def combine(w: np.ndarray, t: int) -> np.ndarray:
    """Merge rows t and t+1 by entrywise addition."""
    w = np.asarray(w, dtype=float)
    merged = w[t] + w[t + 1]
    return np.vstack([w[:t], merged[None, :], w[t + 2 :]])


def _check_round_preconditions(x: np.ndarray, i: int) -> None:
    if not (0 <= i < x.shape[0]):
        raise RoundPreconditionError(f"row {i} out of range for shape {x.shape}")
    if np.any(x < -INT_TOL):
        raise RoundPreconditionError("matrix has negative entries")
    tol = _agg_tol(x.shape[0])
    for r in range(i):
        if not is_integral(float(x[r].sum()), tol):
            raise RoundPreconditionError(f"row {r} sum {x[r].sum()} is not integral")
    for j in range(x.shape[1]):
        if not is_integral(float(x[:, j].sum()), tol):
            raise RoundPreconditionError(f"column {j} sum {x[:, j].sum()} is not integral")


def partial_round_special(x: np.ndarray, i: int) -> tuple[np.ndarray, int, SwapTrace]:
    """Concentrate row i (sum in [0,1)) on one column with an integral prefix.

    Requires integral row sums above row i and integral column sums.  The
    output row i holds its whole mass at the returned column j, and the
    column-j mass of rows 0..i-1 plus row i's mass minus its fractional part
    is a nonnegative integer, which is exactly what ``round_i_row`` needs.
    """
    x = np.asarray(x, dtype=float)
    _check_round_preconditions(x, i)
    if i < 1:
        raise RoundPreconditionError("need at least one prior row")
    row_mass = float(x[i].sum())
    if row_mass < -INT_TOL or (is_integral(row_mass) and round(row_mass) >= 1) or row_mass >= 1.0:
        raise RoundPreconditionError(f"row {i} sum {row_mass} outside [0, 1)")

    n_rows, n_cols = x.shape
    tol = _agg_tol(n_rows)
    prior_total = snap_int(float(x[:i].sum()), tol)
    col_sums = [snap_int(float(x[:, j].sum()), tol) for j in range(n_cols)]
    col_cum = np.cumsum(col_sums)
    total = int(col_cum[-1])

    y = np.array(x, dtype=float)
    trace = SwapTrace()
    if total <= prior_total:
        # Nothing at or below row i carries mass; only reachable when row i
        # is empty, and then every column prefix is already integral.
        return y, 0, trace

    j = int(np.searchsorted(col_cum, prior_total + 1))
    t_val = prior_total - (int(col_cum[j - 1]) if j >= 1 else 0)

    # Step 1: push row i's mass left of j into columns >= j, consuming the
    # prior rows' column-j entries first so as much as possible lands at
    # (i, j) directly.
    v1 = float(y[i, :j].sum())
    if v1 > tol:
        _trans_inplace(y, v1, (0, i - 1, i, i, 0, j - 1, j, n_cols - 1), trace, upper_order="col")

    sigma = float(y[:i, j].sum())
    v4_pending = float(y[i, j + 1 :].sum())
    below_j = float(y[i + 1 :, j].sum())

    if sigma >= t_val - INT_TOL:
        # Lower the prior prefix of column j to an integer target.  Prefer
        # the cheapest target that still leaves enough column-j mass below
        # row i for step 2.
        frac = sigma - _floor_snapped(sigma, tol)
        if _floor_snapped(sigma, tol) >= t_val and below_j + frac >= v4_pending - INT_TOL:
            v2 = frac
        elif _floor_snapped(sigma, tol) - 1 >= t_val:
            v2 = min(frac + 1.0, sigma - t_val)
        else:
            v2 = sigma - t_val
        if v2 > tol:
            _trans_inplace(y, v2, (0, i - 1, i + 1, n_rows - 1, 0, j - 1, j, j), trace)
    else:
        # Raise the prior prefix of column j to the next integer.
        v3 = _ceil_snapped(sigma, tol) - sigma
        if v3 > tol:
            _trans_inplace(y, v3, (0, i - 1, i, n_rows - 1, j, j, j + 1, n_cols - 1), trace)

    # Step 2: pull row i's remaining mass right of j back into column j.
    v4 = float(y[i, j + 1 :].sum())
    if v4 > tol:
        _trans_inplace(y, v4, (i, i, i + 1, n_rows - 1, j, j, j + 1, n_cols - 1), trace)
    return y, j, trace


def partial_round(x: np.ndarray, i: int) -> tuple[np.ndarray, int, SwapTrace]:
    """General-case row preparation: split, run the special case, combine.

    The returned matrix is within 3-swap distance of ``x`` with identical
    marginals; row i dominates the fractional part o of its own sum at the
    returned column j, whose prefix above row i is integral after removing o.
    """
    x = np.asarray(x, dtype=float)
    _check_round_preconditions(x, i)
    row_mass = float(x[i].sum())
    o = row_mass - _floor_snapped(row_mass)
    # A column that already dominates o with an integral prefix needs no
    # swaps at all; column-sum integrality then guarantees the drain mass
    # below row i that the rounding step requires.
    for j in range(x.shape[1]):
        if x[i, j] >= o - INT_TOL:
            z_val = float(x[:i, j].sum()) + x[i, j] - o
            if is_integral(z_val) and round(z_val) >= 0:
                return np.array(x, dtype=float), j, SwapTrace()
    z = split(x, i)
    w, j, trace_z = partial_round_special(z, i + 1)
    y = combine(w, i)
    trace = SwapTrace()
    for a, c, b, d, eps in trace_z.ops:
        a2 = a if a <= i else a - 1
        c2 = c if c <= i else c - 1
        if a2 == c2:
            continue  # the swap acted between the two halves of row i
        trace.append(a2, c2, b, d, eps)
    return y, j, trace


def round_i_row(y: np.ndarray, j: int, i: int) -> np.ndarray:
    """Remove the fractional part of row i's sum from column j.

    Subtracts o = frac(row sum) at (i, j), then drains the complementary
    1 - o from column j strictly below row i, so rows above i and every
    column sum stay integral and the result is entrywise <= y.
    """
    y = np.asarray(y, dtype=float)
    n_rows = y.shape[0]
    row_mass = float(y[i].sum())
    tol = _agg_tol(n_rows)
    o = row_mass - _floor_snapped(row_mass, tol)
    for col in range(y.shape[1]):
        if not is_integral(float(y[:, col].sum()), tol):
            raise RoundPreconditionError(f"column {col} sum is not integral")
    if o <= INT_TOL:
        return np.array(y, dtype=float)
    if y[i, j] < o - tol:
        raise RoundPreconditionError(f"entry ({i},{j})={y[i, j]} is below the fractional part {o}")
    prefix = float(y[:i, j].sum())
    if not is_integral(prefix + y[i, j] - o, tol):
        raise RoundPreconditionError("column prefix condition violated")

    out = np.array(y, dtype=float)
    out[i, j] = max(y[i, j] - o, 0.0)
    residue = 1.0 - o
    for r in range(i + 1, n_rows):
        w = min(float(out[r, j]), residue)
        out[r, j] -= w
        residue -= w
        if residue <= 1e-15:
            residue = 0.0
            break
    if residue > 3.0 * tol:
        raise RoundPreconditionError("insufficient mass below row i to drain")
    return out


def swap_matrix_round(
    a: np.ndarray, on_iteration=None
) -> tuple[np.ndarray, np.ndarray, SwapTrace]:
    """Round row sums to integers while preserving both marginals.

    Requires integral column sums.  Returns (a_prime, b, trace) where
    a_prime has the same marginals as ``a`` and is within 3s-swap distance
    of it, and b <= a_prime has integral row and column sums with
    ||a_prime - b||_1 at most the number of processed rows.

    Rows whose running sum is already integral are skipped untouched.
    ``on_iteration(r, a_r, d_r)`` is called after each processed row for
    invariant checking.
    """
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise RoundPreconditionError("input matrix must be nonnegative")
    for j in range(a.shape[1]):
        if not is_integral(float(a[:, j].sum())):
            raise RoundPreconditionError(f"column {j} sum {a[:, j].sum()} is not integral")

    current = np.array(a, dtype=float)
    residue = np.zeros_like(current)
    trace = SwapTrace()
    last = a.shape[0] - 1
    for r in range(a.shape[0]):
        # The last row's sum is integral whenever all column sums and the
        # prior row sums are, so it is never processed.
        if r == last or is_integral(float(current[r].sum())):
            if on_iteration is not None:
                on_iteration(r, current, residue)
            continue
        y, j, tr = partial_round(current, r)
        rounded = round_i_row(y, j, r)
        residue = residue + np.maximum(y - rounded, 0.0)
        current = rounded
        trace.extend(tr)
        if on_iteration is not None:
            on_iteration(r, current, residue)
    return residue + current, current, trace


def create(
    a: np.ndarray, b: np.ndarray, grid: DiscretizationSet
) -> tuple[np.ndarray, DiscretizationSet]:
    """Convert the residual a - b into fresh probability levels.

    For each column j carrying residual count c_j (a nonnegative integer),
    one new level is appended at the residual's mass-weighted average level,
    holding count c_j at column j.  Column sums, total mass, and row-sum
    integrality are preserved; the weighted average can only help the
    linear part of the objective.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.shape[0] != grid.ell:
        raise CreatePreconditionError(
            f"shape mismatch: a {a.shape}, b {b.shape}, grid {grid.ell} levels"
        )
    tol = max(1e-7, _agg_tol(b.shape[0]))
    if np.any(b < -INT_TOL) or np.any(b - a > tol):
        raise CreatePreconditionError("need 0 <= b <= a entrywise")
    for r in range(b.shape[0]):
        if not is_integral(float(b[r].sum()), tol):
            raise CreatePreconditionError(f"b row {r} sum is not integral")
    for j in range(b.shape[1]):
        if not is_integral(float(b[:, j].sum()), tol):
            raise CreatePreconditionError(f"b column {j} sum is not integral")

    residual = np.clip(a - b, 0.0, None)
    levels = grid.as_array()
    rows: dict[float, np.ndarray] = {float(r): b[idx].copy() for idx, r in enumerate(levels)}
    for j in range(a.shape[1]):
        count = float(residual[:, j].sum())
        if count <= 1e-9:
            continue
        if not is_integral(count, 1e-6):
            raise CreatePreconditionError(f"residual count {count} in column {j} is not integral")
        new_level = min(float(levels @ residual[:, j]) / count, 1.0)
        row = rows.setdefault(new_level, np.zeros(a.shape[1]))
        row[j] += count
    ordered = sorted(rows)
    x_final = np.vstack([rows[r] for r in ordered])
    return x_final, DiscretizationSet(tuple(ordered))
