"""Predictions conditional on a pilot sample of size n with k species.

Core facts used throughout:

* the count S_m of draws (out of an additional m) that fall in unseen
  species is Beta-Binomial(m, theta + k*alpha, n - k*alpha);
* given S_m = s, the number of new species behaves exactly like the species
  count of a fresh s-sample under the prior with theta shifted to
  theta + k*alpha (deletion of the first k classes);
* mixing the two recovers the closed-form law of the new-species count K_m
  through the non-central first-kind triangle with shift r = n - k*alpha:

      P(K_m = j | K_n = k) = (theta+k*alpha)_{j, alpha} / (theta+n)_m * S(m, j; alpha, r).
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .backend import kernels
from .logspace import log_choose, log_gen_rising, log_rising
from .pmf import Pmf, point_mass
from .prior import PDParams, _alternating_moment, kn_pmf

DEFAULT_EXACT_CAP = 10_000


class ExactCapExceeded(ValueError):
    """Raised when an exact-path computation is requested beyond the cap."""


@dataclass(frozen=True)
class PredictionQuery:
    """A pilot sample summary (n, k) plus the additional sample size m."""

    params: PDParams
    n: int
    k: int
    m: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"k must lie in [1, n], got k={self.k}, n={self.n}")
        if self.m < 0:
            raise ValueError("m must be >= 0")


def sm_pmf(q: PredictionQuery) -> Pmf:
    """Law of the new-species occupancy S_m, support {0, ..., m}."""
    a, th = q.params.alpha, q.params.theta
    if q.m == 0:
        return point_mass(0)
    old = q.n - q.k * a
    new = th + q.k * a
    s = np.arange(q.m + 1)
    logs = np.array(
        [
            log_choose(q.m, int(i))
            + log_rising(old, q.m - int(i))
            + log_rising(new, int(i))
            - log_rising(th + q.n, q.m)
            for i in s
        ]
    )
    return Pmf(0, logs)


def new_species_prob(q: PredictionQuery) -> float:
    """One-step discovery probability (theta + k*alpha) / (theta + n); needs m == 1."""
    if q.m != 1:
        raise ValueError("one-step discovery probability needs m = 1")
    return (q.params.theta + q.k * q.params.alpha) / (q.params.theta + q.n)


def km_given_sm_pmf(params: PDParams, k: int, s: int) -> Pmf:
    """Law of the new-species count given S_m = s, support {0, ..., s}.

    For s >= 1 this is exactly the prior species-count law at sample size s
    under (alpha, theta + k*alpha) -- same code path -- padded with zero mass
    at 0.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if s < 0:
        raise ValueError("s must be >= 0")
    if s == 0:
        return point_mass(0)
    shifted = PDParams(params.alpha, params.theta + k * params.alpha)
    inner = kn_pmf(shifted, s)
    return Pmf(0, np.concatenate(([-math.inf], inner.log_probs)))


@lru_cache(maxsize=64)
def _noncentral_row_logs(alpha: float, r: float, m: int) -> np.ndarray:
    row = kernels.noncentral1_row(m, alpha, r)
    row.setflags(write=False)
    return row


def km_pmf(q: PredictionQuery, exact_cap: int = DEFAULT_EXACT_CAP) -> Pmf:
    """Exact law of the new-species count K_m, support {0, ..., m}.

    Builds row m of the non-central triangle (O(m^2) time, O(m) memory,
    cached per (alpha, shift, m)); refuses m beyond ``exact_cap``.
    """
    if q.m > exact_cap:
        raise ExactCapExceeded(
            f"m={q.m} exceeds the exact-path cap {exact_cap}; use the asymptotic law"
        )
    a, th = q.params.alpha, q.params.theta
    if q.m == 0:
        return point_mass(0)
    r = q.n - q.k * a
    row = _noncentral_row_logs(a, r, q.m)
    js = np.arange(q.m + 1)
    head = np.array([log_gen_rising(th + q.k * a, int(j), a) for j in js])
    return Pmf(0, head - log_rising(th + q.n, q.m) + row)


def km_mean(q: PredictionQuery) -> float:
    """Closed-form conditional expectation of the new-species count.

    ((theta+k*alpha)/alpha) * [ (theta+alpha+n)_m / (theta+n)_m - 1 ],
    evaluated with expm1 of log-Gamma differences so the near-cancellation at
    small m stays accurate.
    """
    if q.m == 0:
        return 0.0
    a, th = q.params.alpha, q.params.theta
    d = log_rising(th + a + q.n, q.m) - log_rising(th + q.n, q.m)
    return (th + q.k * a) / a * math.expm1(d)


def km_moment(q: PredictionQuery, r: int) -> float:
    """r-th conditional moment of the new-species count, closed form."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if q.m == 0:
        return 0.0
    a, th = q.params.alpha, q.params.theta
    gamma = (th + q.k * a) / a
    return _alternating_moment(
        gamma_shift=gamma,
        pochhammer_base=gamma,
        r=r,
        tail_base=th + q.n,
        tail_length=q.m,
        alpha=a,
    )


@dataclass(frozen=True)
class CredibleInterval:
    lo: int
    hi: int
    level: float
    achieved: float
    method: str


def _smallest_window(probs: np.ndarray, level: float) -> tuple:
    """Smallest-cardinality contiguous index window with mass >= level."""
    csum = np.concatenate(([0.0], np.cumsum(probs)))
    size = len(probs)

    def best_for(length: int):
        masses = csum[length:] - csum[: size - length + 1]
        start = int(np.argmax(masses))
        return start, float(masses[start])

    lo_len, hi_len = 1, size
    # max window mass is nondecreasing in length: binary search the minimum
    while lo_len < hi_len:
        mid = (lo_len + hi_len) // 2
        _, mass = best_for(mid)
        if mass >= level - 1e-12:
            hi_len = mid
        else:
            lo_len = mid + 1
    start, mass = best_for(lo_len)
    return start, start + lo_len - 1, mass


def credible_interval(
    q: PredictionQuery,
    level: float,
    method: str = "exact",
    exact_cap: int = DEFAULT_EXACT_CAP,
    sample_count: int = 100_000,
    seed: int = 0,
) -> CredibleInterval:
    """Credible interval for the new-species count.

    exact: smallest contiguous set of values whose exact pmf mass reaches
    the level.  asymptotic: outward-rounded empirical quantiles of
    m^alpha * Z for Z drawn from the limit law, reported with the fraction
    of draws covered.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if q.m == 0:
        return CredibleInterval(0, 0, level, 1.0, "exact")
    if method == "exact":
        pmf = km_pmf(q, exact_cap=exact_cap)
        start, stop, mass = _smallest_window(pmf.probs, level)
        return CredibleInterval(int(start), int(stop), level, mass, "exact")
    if method == "asymptotic":
        tail = sample_count * (1.0 - level) / 2.0
        if tail < 10.0:
            raise ValueError(
                f"sample_count={sample_count} too small for level={level}; "
                "need at least 10 expected draws per tail"
            )
        from .asymptotics import LimitLaw, sample_limit

        law = LimitLaw(q.params.alpha, q.params.theta, q.n, q.k)
        z = sample_limit(law, sample_count, seed)
        vals = q.m**q.params.alpha * z
        lo = int(max(0, math.floor(np.quantile(vals, (1.0 - level) / 2.0))))
        hi = int(min(q.m, math.ceil(np.quantile(vals, 1.0 - (1.0 - level) / 2.0))))
        achieved = float(np.mean((vals >= lo) & (vals <= hi)))
        return CredibleInterval(lo, hi, level, achieved, "asymptotic")
    raise ValueError(f"unknown method {method!r}")
