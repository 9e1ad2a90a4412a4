"""Sample profiles: the multiset of observed symbol frequencies."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateFrequency, EmptyInput, InvalidEntry


@dataclass(frozen=True)
class Profile:
    """Observed frequency histogram of a sample of size ``n``.

    ``freqs`` lists ``(m_j, phi_j)`` pairs, strictly increasing in ``m_j``:
    ``phi_j`` symbols were each seen exactly ``m_j >= 1`` times.  Frequency
    zero (unseen symbols) is never stored.
    """

    n: int
    freqs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.freqs:
            raise InvalidEntry("profile needs at least one frequency entry")
        prev = 0
        total = 0
        for m, phi in self.freqs:
            if m <= prev:
                raise DuplicateFrequency(f"frequencies must be strictly increasing, got {m} after {prev}")
            if phi < 1 or int(phi) != phi or int(m) != m:
                raise InvalidEntry(f"invalid profile entry ({m}, {phi})")
            prev = m
            total += m * phi
        if total != self.n:
            raise InvalidEntry(f"profile mass {total} does not match n={self.n}")

    @property
    def k(self) -> int:
        """Number of distinct observed frequencies."""
        return len(self.freqs)

    @property
    def m(self) -> np.ndarray:
        """Distinct frequencies, ascending, shape (k,)."""
        return np.array([m for m, _ in self.freqs], dtype=np.int64)

    @property
    def phi(self) -> np.ndarray:
        """Multiplicities matching ``m``, shape (k,)."""
        return np.array([phi for _, phi in self.freqs], dtype=np.int64)

    @property
    def freqs_with_zero(self) -> np.ndarray:
        """Frequency labels for allocation columns: ``[0, m_1, ..., m_k]``."""
        return np.concatenate(([0], self.m))

    def distinct_observed(self) -> int:
        """Number of distinct symbols that appeared at least once."""
        return int(self.phi.sum())

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "entries": [{"freq": int(m), "count": int(phi)} for m, phi in self.freqs]}
        )

    @classmethod
    def from_json(cls, text: str) -> "Profile":
        data = json.loads(text)
        pairs = [(entry["freq"], entry["count"]) for entry in data["entries"]]
        prof = profile_from_counts(pairs)
        if prof.n != data["n"]:
            raise InvalidEntry(f"declared n={data['n']} does not match entries (n={prof.n})")
        return prof


def build_profile(samples: Sequence) -> Profile:
    """Count token frequencies and collapse them into a Profile.

    Tokens are opaque; only hashing and equality are used, so any relabeling
    of the sample yields the identical profile.
    """
    samples = list(samples)
    if not samples:
        raise EmptyInput("cannot build a profile from an empty sample")
    freq_of_token = Counter(samples)
    multiplicity = Counter(freq_of_token.values())
    freqs = tuple(sorted(multiplicity.items()))
    return Profile(n=len(samples), freqs=freqs)


def profile_from_counts(pairs: Iterable[tuple[int, int]]) -> Profile:
    """Build a Profile from explicit (frequency, multiplicity) pairs."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyInput("no (frequency, count) pairs given")
    seen = set()
    for m, phi in pairs:
        if m in seen:
            raise DuplicateFrequency(f"frequency {m} listed twice")
        seen.add(m)
        if m < 1 or phi < 1:
            raise InvalidEntry(f"nonpositive entry ({m}, {phi})")
    freqs = tuple(sorted((int(m), int(phi)) for m, phi in pairs))
    n = sum(m * phi for m, phi in freqs)
    return Profile(n=n, freqs=freqs)


def log_c_phi(p: Profile) -> float:
    """log of the multinomial coefficient n! / prod_j (m_j!)^phi_j.

    Evaluated through lgamma so it stays finite for large n.
    """
    out = math.lgamma(p.n + 1)
    for m, phi in p.freqs:
        out -= phi * math.lgamma(m + 1)
    return out
