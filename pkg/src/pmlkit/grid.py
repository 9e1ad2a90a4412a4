"""Geometric probability grids and grid-rounding of distributions."""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass

import numpy as np

from .distribution import PseudoDistribution
from .errors import BelowGrid, EmptyGrid, InvalidSampleSize


@dataclass(frozen=True)
class DiscretizationSet:
    """Strictly increasing probability levels r_1 < ... < r_ell in (0, 1]."""

    levels: tuple[float, ...]

    def __post_init__(self):
        if not self.levels:
            raise EmptyGrid("a discretization set needs at least one level")
        prev = 0.0
        for r in self.levels:
            if not (0.0 < r <= 1.0):
                raise EmptyGrid(f"level {r} outside (0, 1]")
            if r <= prev:
                raise EmptyGrid("levels must be strictly increasing")
            prev = r

    @property
    def ell(self) -> int:
        return len(self.levels)

    @property
    def r_min(self) -> float:
        return self.levels[0]

    def as_array(self) -> np.ndarray:
        return np.array(self.levels, dtype=float)

    def to_json(self) -> str:
        return json.dumps({"levels": list(self.levels)})

    @classmethod
    def from_json(cls, text: str) -> "DiscretizationSet":
        return cls(tuple(json.loads(text)["levels"]))


def build_grid(n: int, alpha: float) -> DiscretizationSet:
    """Geometric grid from 1/(2n^2) with ratio (1 + n^-alpha), plus the level 1.

    Levels are produced by repeated multiplication so reruns are bitwise
    reproducible; the value 1 is appended and exact duplicates are dropped.
    """
    if n < 2:
        raise InvalidSampleSize(f"need n >= 2, got {n}")
    if alpha <= 0:
        raise InvalidSampleSize(f"need alpha > 0, got {alpha}")
    ratio = 1.0 + float(n) ** (-alpha)
    levels = []
    value = 1.0 / (2.0 * n * n)
    while value <= 1.0:
        levels.append(value)
        value = value * ratio
    if levels[-1] != 1.0:
        levels.append(1.0)
    return DiscretizationSet(tuple(levels))


def scale_grid(grid: DiscretizationSet, c: float) -> DiscretizationSet:
    """Multiply every level by c >= 1, discarding anything that leaves (0, 1]."""
    if c < 1.0:
        raise EmptyGrid(f"scale factor must be >= 1, got {c}")
    scaled = tuple(r * c for r in grid.levels if r * c <= 1.0)
    if not scaled:
        raise EmptyGrid(f"scaling by {c} removed every level")
    return DiscretizationSet(scaled)


def floor_to_grid(grid: DiscretizationSet, x: float) -> float:
    """Largest level <= x."""
    if x < grid.levels[0]:
        raise BelowGrid(f"{x} is below the smallest level {grid.levels[0]}")
    idx = bisect.bisect_right(grid.levels, x) - 1
    return grid.levels[idx]


def round_distribution(p: PseudoDistribution, grid: DiscretizationSet) -> PseudoDistribution:
    """Floor every level of ``p`` onto the grid, merging equal results.

    Every input level must already be >= the smallest grid level; counts are
    preserved so the total mass can only shrink.
    """
    return PseudoDistribution.from_pairs(
        (floor_to_grid(grid, level), count) for level, count in p.entries
    )
