import math

import numpy as np
import pytest
from sklearn.base import clone

from pmlkit import ProfileMaximumLikelihood, check_samples, profile_from_counts
from pmlkit.errors import EmptyInput, InvalidEntry


def test_check_samples_accepts_sequences():
    assert check_samples(["a", "b"]) == ["a", "b"]
    assert check_samples(np.array([1, 2, 3])) == [1, 2, 3]
    assert check_samples(np.array([[1], [2]])) == [1, 2]


def test_check_samples_rejects_bad_input():
    with pytest.raises(EmptyInput):
        check_samples([])
    with pytest.raises(InvalidEntry):
        check_samples(np.zeros((2, 2)))


def test_get_set_params_round_trip():
    est = ProfileMaximumLikelihood(alpha=0.5, max_scales=10)
    params = est.get_params()
    assert params["alpha"] == 0.5
    assert params["max_scales"] == 10
    cloned = clone(est)
    assert cloned.get_params() == params
    est.set_params(gap_tol=1e-3)
    assert est.gap_tol == 1e-3


def test_fit_sets_attributes():
    rng = np.random.default_rng(70)
    samples = [f"s{t}" for t in rng.integers(0, 8, size=120)]
    est = ProfileMaximumLikelihood(max_scales=15).fit(samples)
    assert est.profile_.n == 120
    assert est.distribution_.mass <= 1.0 + 1e-9
    assert est.scale_ >= 1.0
    assert math.isfinite(est.log_objective_)


def test_fit_profile_direct():
    profile = profile_from_counts([(1, 3), (2, 2), (5, 1)])
    est = ProfileMaximumLikelihood(max_scales=15).fit_profile(profile)
    assert est.profile_ is profile
    assert est.distribution_.support >= 1


def test_predict_property():
    rng = np.random.default_rng(71)
    samples = [f"s{t}" for t in rng.integers(0, 5, size=200)]
    est = ProfileMaximumLikelihood(max_scales=15).fit(samples)
    ent = est.predict_property("entropy")
    assert 0.0 <= ent <= math.log(est.distribution_.support) + 1e-9
    assert est.predict_property("support_size") >= 5


def test_predict_before_fit_raises():
    with pytest.raises(InvalidEntry):
        ProfileMaximumLikelihood().predict_property("entropy")


def test_fit_deterministic():
    samples = ["a"] * 5 + ["b"] * 3 + ["c", "d"]
    a = ProfileMaximumLikelihood(max_scales=10).fit(samples)
    b = ProfileMaximumLikelihood(max_scales=10).fit(samples)
    assert a.distribution_ == b.distribution_
    assert a.log_objective_ == b.log_objective_
