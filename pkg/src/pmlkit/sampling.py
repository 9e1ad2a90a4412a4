"""Deterministic synthetic sampling for benchmarks and tests.

The random stream is a bare splitmix64 generator: 64-bit state advanced by
the golden-gamma constant and finalized with two xor-shift multiplies.
A run keyed by (family, n, seed) draws from ``SplitMix64(seed ^ mix(n))``,
so any implementation of the same contract reproduces the streams.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Minimal splitmix64 stream; uniform() yields floats in [0, 1)."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        return _mix(self.state)

    def uniform(self) -> float:
        return self.next_u64() / 2.0**64

    def uniforms(self, n: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(n)])


def stream_for_run(family: str, n: int, seed: int) -> SplitMix64:
    """The documented per-run stream: seed xor mixed family hash xor mixed n."""
    fam = 0
    for ch in family:
        fam = _mix(fam ^ ord(ch))
    return SplitMix64(seed ^ _mix(n) ^ fam)


def family_weights(name: str, **params) -> np.ndarray:
    """Element probabilities for a named synthetic family."""
    if name == "uniform":
        big_k = int(params["K"])
        if big_k < 1:
            raise DomainError("uniform family needs K >= 1")
        return np.full(big_k, 1.0 / big_k)
    if name == "zipf":
        big_k = int(params["K"])
        s = float(params.get("s", 1.0))
        if big_k < 1:
            raise DomainError("zipf family needs K >= 1")
        w = 1.0 / np.arange(1, big_k + 1, dtype=float) ** s
        return w / w.sum()
    if name == "geometric":
        big_k = int(params["K"])
        ratio = float(params.get("ratio", 0.5))
        if not (0.0 < ratio < 1.0):
            raise DomainError("geometric family needs ratio in (0, 1)")
        w = ratio ** np.arange(big_k, dtype=float)
        return w / w.sum()
    raise DomainError(f"unknown family {name!r}")


def true_property(name: str, probs: np.ndarray, **params) -> float:
    """Ground-truth property value of an explicit weight vector."""
    probs = probs[probs > 0.0]
    if name == "entropy":
        return float(-(probs * np.log(probs)).sum())
    if name == "support_size":
        return float(len(probs))
    if name == "support_coverage":
        m = int(params["m"])
        return float((1.0 - (1.0 - probs) ** m).sum())
    if name == "distance_to_uniformity":
        big_k = int(params.get("K", len(probs)))
        u = 1.0 / big_k
        desc = np.sort(probs)[::-1]
        head = desc[:big_k]
        extra = desc[big_k:]
        missing = max(big_k - len(desc), 0)
        return float(np.abs(head - u).sum() + extra.sum() + missing * u)
    raise DomainError(f"unknown property {name!r}")


def draw_tokens(probs: np.ndarray, n: int, rng: SplitMix64) -> list[str]:
    """Draw n tokens 'e0', 'e1', ... from the categorical distribution."""
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    us = rng.uniforms(n)
    idx = np.searchsorted(cum, us, side="right")
    return [f"e{i}" for i in idx]


def sample_family(family: str, n: int, seed: int, **params) -> list[str]:
    probs = family_weights(family, **params)
    rng = stream_for_run(family, n, seed)
    return draw_tokens(probs, n, rng)


def entropy_of_weights(probs: np.ndarray) -> float:
    return true_property("entropy", probs)


def log_k(k: int) -> float:
    return math.log(k)
