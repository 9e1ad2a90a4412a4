import math

import numpy as np
import pytest

from pmlkit.sampling import (
    SplitMix64,
    family_weights,
    sample_family,
    stream_for_run,
    true_property,
)


def test_splitmix_known_stream():
    # golden values: splitmix64 from seed 0
    rng = SplitMix64(0)
    assert rng.next_u64() == 0xE220A8397B1DCDAF
    assert rng.next_u64() == 0x6E789E6AA1B965F4


def test_streams_reproducible():
    a = sample_family("zipf", 50, 7, K=20, s=1.0)
    b = sample_family("zipf", 50, 7, K=20, s=1.0)
    assert a == b
    c = sample_family("zipf", 50, 8, K=20, s=1.0)
    assert a != c


def test_stream_keyed_by_run():
    u1 = stream_for_run("uniform", 100, 3).uniform()
    u2 = stream_for_run("uniform", 101, 3).uniform()
    u3 = stream_for_run("zipf", 100, 3).uniform()
    assert len({u1, u2, u3}) == 3


def test_family_weights():
    w = family_weights("uniform", K=4)
    assert np.allclose(w, 0.25)
    z = family_weights("zipf", K=3, s=1.0)
    assert np.allclose(z, np.array([1.0, 0.5, 1 / 3]) / (11 / 6))
    g = family_weights("geometric", K=3, ratio=0.5)
    assert np.allclose(g, np.array([4, 2, 1]) / 7)


def test_true_properties():
    w = family_weights("uniform", K=50)
    assert true_property("entropy", w) == pytest.approx(math.log(50))
    assert true_property("support_size", w) == 50
    assert true_property("distance_to_uniformity", w, K=50) == pytest.approx(0.0)
    assert true_property("support_coverage", w, m=1) == pytest.approx(1.0)


def test_sample_family_shape():
    samples = sample_family("uniform", 200, 0, K=10)
    assert len(samples) == 200
    assert all(s.startswith("e") for s in samples)
    assert len(set(samples)) <= 10
