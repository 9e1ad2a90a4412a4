"""Symmetric property functionals evaluated on pseudo-distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distribution import PseudoDistribution
from .errors import DomainError


@dataclass(frozen=True)
class PropertyValue:
    name: str
    value: float
    params: dict = field(default_factory=dict)


def entropy(d: PseudoDistribution) -> float:
    """Shannon entropy in nats of d normalized to unit mass."""
    total = d.mass
    if total <= 0.0:
        raise DomainError("entropy of an empty distribution")
    return float(
        -sum(count * (level / total) * math.log(level / total) for level, count in d.entries)
    )


def support_size(d: PseudoDistribution, threshold: float = 0.0) -> int:
    """Number of elements whose level is at least the threshold."""
    return int(sum(count for level, count in d.entries if level >= threshold))


def support_coverage(d: PseudoDistribution, m: int) -> float:
    """Expected number of distinct elements in m fresh draws."""
    return float(sum(count * (1.0 - (1.0 - level) ** m) for level, count in d.entries))


def distance_to_uniformity(d: PseudoDistribution, big_k: int) -> float:
    """l1 distance to the uniform distribution on big_k elements.

    Elements beyond the support count at probability zero on either side.
    """
    if big_k < 1:
        raise DomainError(f"need a positive support size, got {big_k}")
    probs = d.expand()
    u = 1.0 / big_k
    head = probs[:big_k]
    extra = probs[big_k:]
    missing = max(big_k - len(probs), 0)
    return float(np.abs(head - u).sum() + extra.sum() + missing * u)


def sorted_l1(a: PseudoDistribution, b: PseudoDistribution) -> float:
    """l1 distance between the descending-sorted element vectors.

    This is the minimum l1 distance over relabelings, so both inputs should
    be normalized for it to be a meaningful distribution distance.
    """
    pa = a.expand()
    pb = b.expand()
    size = max(len(pa), len(pb))
    pa = np.pad(pa, (0, size - len(pa)))
    pb = np.pad(pb, (0, size - len(pb)))
    return float(np.abs(pa - pb).sum())


def compute_property(name: str, d: PseudoDistribution, **params) -> PropertyValue:
    """Dispatch a property by name; unknown names raise DomainError."""
    normalized = d.normalize()
    if name == "entropy":
        return PropertyValue(name, entropy(normalized))
    if name == "support_size":
        threshold = float(params.get("threshold", 0.0))
        return PropertyValue(name, float(support_size(normalized, threshold)), {"threshold": threshold})
    if name == "support_coverage":
        m = int(params.get("m", d.support or 1))
        return PropertyValue(name, support_coverage(normalized, m), {"m": m})
    if name == "distance_to_uniformity":
        big_k = int(params.get("K", normalized.support))
        return PropertyValue(name, distance_to_uniformity(normalized, big_k), {"K": big_k})
    raise DomainError(f"unknown property {name!r}")
