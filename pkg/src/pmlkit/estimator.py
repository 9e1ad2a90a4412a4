"""scikit-learn style front end for the profile maximum likelihood estimator."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .distribution import PseudoDistribution
from .errors import EmptyInput, InvalidEntry
from .pipeline import RunConfig, estimate
from .profile import Profile, build_profile
from .properties import compute_property


def check_samples(x) -> list:
    """Validate and flatten a 1-d token sequence.

    Accepts lists, tuples, and 1-d (or single-column) arrays; tokens are
    treated as opaque hashables.
    """
    if isinstance(x, np.ndarray):
        if x.ndim == 2 and x.shape[1] == 1:
            x = x.ravel()
        if x.ndim != 1:
            raise InvalidEntry(f"expected a 1-d sample sequence, got shape {x.shape}")
        x = x.tolist()
    else:
        x = list(x)
    if len(x) == 0:
        raise EmptyInput("empty sample")
    return x


class ProfileMaximumLikelihood(BaseEstimator):
    """Estimate a discrete distribution's sorted shape from one sample.

    ``fit`` ingests a 1-d sequence of opaque tokens, builds its frequency
    profile, and computes an approximate profile maximum likelihood
    pseudo-distribution.  Fitted attributes:

    - ``profile_``: the observed frequency profile
    - ``distribution_``: the estimated pseudo-distribution (levels/counts)
    - ``scale_``: the grid scaling chosen by the model selection loop
    - ``log_objective_``: the winning run's log objective value

    Plug-in property estimates are served by ``predict_property``.
    """

    def __init__(
        self,
        alpha: float = 1.0 / 3.0,
        gap_tol: float = 1e-4,
        max_iters: int = 5000,
        seed: int = 0,
        resolve_levels: bool = False,
        max_scales: int = 200,
    ):
        self.alpha = alpha
        self.gap_tol = gap_tol
        self.max_iters = max_iters
        self.seed = seed
        self.resolve_levels = resolve_levels
        self.max_scales = max_scales

    def _config(self) -> RunConfig:
        return RunConfig(
            alpha=self.alpha,
            gap_tol=self.gap_tol,
            max_iters=self.max_iters,
            seed=self.seed,
            resolve_levels=self.resolve_levels,
            max_scales=self.max_scales,
        )

    def fit(self, X, y=None):
        samples = check_samples(X)
        self.profile_ = build_profile(samples)
        result = estimate(self.profile_, self._config())
        self.distribution_ = result.distribution
        self.scale_ = result.scale
        self.log_objective_ = result.log_objective
        return self

    def fit_profile(self, profile: Profile):
        """Fit directly from a prebuilt profile instead of raw samples."""
        self.profile_ = profile
        result = estimate(profile, self._config())
        self.distribution_ = result.distribution
        self.scale_ = result.scale
        self.log_objective_ = result.log_objective
        return self

    def predict_property(self, name: str, **params) -> float:
        if not hasattr(self, "distribution_"):
            raise InvalidEntry("estimator is not fitted; call fit first")
        return compute_property(name, self.distribution_, **params).value

    @property
    def normalized_distribution_(self) -> PseudoDistribution:
        if not hasattr(self, "distribution_"):
            raise InvalidEntry("estimator is not fitted; call fit first")
        return self.distribution_.normalize()
