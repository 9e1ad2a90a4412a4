"""Pseudo-distributions: level/count pairs with total mass at most one."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidEntry

MASS_TOL = 1e-9


@dataclass(frozen=True)
class PseudoDistribution:
    """A nonnegative probability assignment with total mass <= 1.

    ``entries`` holds (level, count) pairs with distinct levels in (0, 1]
    sorted ascending; ``count`` domain elements carry probability ``level``
    each.  The empty distribution (mass 0) is allowed.
    """

    entries: tuple[tuple[float, int], ...]

    def __post_init__(self):
        prev = 0.0
        for level, count in self.entries:
            if not (0.0 < level <= 1.0 + MASS_TOL):
                raise InvalidEntry(f"level {level} outside (0, 1]")
            if count < 1 or int(count) != count:
                raise InvalidEntry(f"count {count} must be a positive integer")
            if level <= prev:
                raise InvalidEntry("levels must be strictly increasing and distinct")
            prev = level
        if self.mass > 1.0 + MASS_TOL:
            raise InvalidEntry(f"total mass {self.mass} exceeds 1")

    @classmethod
    def from_pairs(cls, pairs) -> "PseudoDistribution":
        """Build from possibly unsorted (level, count) pairs, merging equal levels."""
        merged: dict[float, int] = {}
        for level, count in pairs:
            merged[float(level)] = merged.get(float(level), 0) + int(count)
        entries = tuple(sorted((lv, c) for lv, c in merged.items() if c > 0))
        return cls(entries)

    @property
    def mass(self) -> float:
        return float(sum(level * count for level, count in self.entries))

    @property
    def support(self) -> int:
        return int(sum(count for _, count in self.entries))

    def expand(self) -> np.ndarray:
        """Per-element probability vector, descending."""
        probs = [level for level, count in self.entries for _ in range(count)]
        return np.array(sorted(probs, reverse=True), dtype=float)

    def normalize(self) -> "PseudoDistribution":
        """Scale levels by 1/mass so the result sums to one."""
        total = self.mass
        if total <= 0.0:
            raise DomainError("cannot normalize an empty distribution")
        return PseudoDistribution.from_pairs(
            (min(level / total, 1.0), count) for level, count in self.entries
        )

    def to_json(self, scale: float | None = None, log_objective: float | None = None) -> str:
        payload = {
            "levels": [{"p": level, "count": count} for level, count in self.entries],
            "total_mass": self.mass,
        }
        if scale is not None:
            payload["scale"] = scale
        if log_objective is not None:
            payload["log_objective"] = log_objective
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "PseudoDistribution":
        data = json.loads(text)
        return cls.from_pairs((item["p"], item["count"]) for item in data["levels"])
