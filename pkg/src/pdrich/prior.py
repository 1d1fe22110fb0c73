"""The unconditional two-parameter Poisson-Dirichlet partition model.

Partition probabilities factor as  V(n,k) * prod_j (1-alpha)_{n_j - 1}  with
weights  V(n,k) = (theta+alpha)_{k-1, step alpha} / (theta+1)_{n-1}.  The
number of species K_n in an n-sample has law

    P(K_n = k) = V(n,k) * S1(n,k),

with S1 the generalized first-kind Stirling triangle for alpha, expectation

    E K_n = (theta+alpha)_n / (alpha (theta+1)_{n-1}) - theta/alpha,

and r-th moment an alternating sum over the signless non-central second-kind
triangle with shift theta/alpha.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .backend import kernels
from .logspace import log_gen_rising, log_rising
from .pmf import Pmf


@dataclass(frozen=True)
class PDParams:
    """Prior parameter pair: 0 < alpha < 1, theta > -alpha (strict)."""

    alpha: float
    theta: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.theta + self.alpha > 0.0:
            raise ValueError(
                f"theta must exceed -alpha, got theta={self.theta}, alpha={self.alpha}"
            )


@dataclass(frozen=True)
class PartitionData:
    """Observed multiplicities (n_1, ..., n_k), each >= 1."""

    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) == 0:
            raise ValueError("counts must be nonempty")
        if any(c < 1 for c in counts):
            raise ValueError("every count must be >= 1")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def k(self) -> int:
        return len(self.counts)


def log_weight(params: PDParams, n: int, k: int) -> float:
    """log V(n,k) = log (theta+alpha)_{k-1, alpha} - log (theta+1)_{n-1}."""
    return log_gen_rising(params.theta + params.alpha, k - 1, params.alpha) - log_rising(
        params.theta + 1.0, n - 1
    )


def eppf_log(params: PDParams, data: PartitionData) -> float:
    """Log probability of one specific set partition with the given block sizes.

    Summation runs in sorted count order so the value is bitwise symmetric
    under permutations of the blocks.
    """
    out = log_weight(params, data.n, data.k)
    for c in sorted(data.counts):
        out += log_rising(1.0 - params.alpha, c - 1)
    return out


@lru_cache(maxsize=1024)
def _stirling1_logs(alpha: float, nmax: int) -> np.ndarray:
    logs = kernels.stirling1_table(nmax, alpha)
    logs.setflags(write=False)
    return logs


@lru_cache(maxsize=256)
def _stirling2_signed(gamma: float, rmax: int) -> np.ndarray:
    """Small signed second-kind triangle in linear space.

    Moment orders are small, so linear doubles are exact enough; unlike the
    log-scale table this remains valid for gamma in (-1, 0], which the prior
    moment formula hits when theta <= 0.
    """
    t = np.zeros((rmax + 1, rmax + 1))
    t[0, 0] = 1.0
    for n in range(rmax):
        for k in range(n + 2):
            prev = t[n, k - 1] if k >= 1 else 0.0
            t[n + 1, k] = prev + (k + gamma) * t[n, k]
    t.setflags(write=False)
    return t


def kn_pmf(params: PDParams, n: int) -> Pmf:
    """Law of the number of species in an n-sample, support {1, ..., n}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s1 = _stirling1_logs(params.alpha, n)
    ks = np.arange(1, n + 1)
    logv = np.array([log_weight(params, n, int(k)) for k in ks])
    return Pmf(1, logv + s1[n, 1 : n + 1])


def kn_mean(params: PDParams, n: int) -> float:
    """E K_n in closed form."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, th = params.alpha, params.theta
    log_ratio = log_rising(th + a, n) - log_rising(th + 1.0, n - 1)
    return math.exp(log_ratio) / a - th / a


def kn_moment(params: PDParams, n: int, r: int) -> float:
    """E K_n^r via the alternating second-kind-triangle sum."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if r < 1:
        raise ValueError("r must be >= 1")
    a, th = params.alpha, params.theta
    gamma = th / a
    return _alternating_moment(
        gamma_shift=gamma,
        pochhammer_base=gamma + 1.0,
        r=r,
        tail_base=th + 1.0,
        tail_length=n - 1,
        alpha=a,
    )


def _alternating_moment(gamma_shift, pochhammer_base, r, tail_base, tail_length,
                        alpha) -> float:
    """sum_j (-1)^(r-j) (base)_j S2[r,j] (tail_base + j*alpha)_len / (tail_base)_len.

    Shared by the prior and conditional moment formulas.  The alternating sum
    can cancel by many orders of magnitude when the triangle shift is large
    and the tail ratios are near 1; in that regime doubles are recomputed at
    50 decimal digits so the result keeps full double accuracy.
    """
    s2 = _stirling2_signed(gamma_shift, r)

    def tail_log(j):
        if tail_length == 0:
            return 0.0
        return log_rising(tail_base + j * alpha, tail_length) - log_rising(
            tail_base, tail_length
        )

    terms = []
    poch = 1.0
    for j in range(r + 1):
        if j > 0:
            poch *= pochhammer_base + (j - 1)
        coeff = s2[r, j]
        if coeff == 0.0:
            continue
        sign = 1.0 if (r - j) % 2 == 0 else -1.0
        terms.append(sign * poch * coeff * math.exp(tail_log(j)))
    total = math.fsum(terms)
    peak = max(abs(t) for t in terms)
    if total != 0.0 and peak <= 1e3 * abs(total):
        return float(total)
    return _alternating_moment_mp(
        gamma_shift, pochhammer_base, r, tail_base, tail_length, alpha
    )


def _alternating_moment_mp(gamma_shift, pochhammer_base, r, tail_base, tail_length,
                           alpha) -> float:
    """High-precision evaluation of the alternating moment sum."""
    from mpmath import mp, mpf, loggamma

    with mp.workdps(50):
        g = mpf(gamma_shift)
        tri = [[mpf(0)] * (r + 1) for _ in range(r + 1)]
        tri[0][0] = mpf(1)
        for i in range(r):
            for j in range(i + 2):
                prev = tri[i][j - 1] if j >= 1 else mpf(0)
                tri[i + 1][j] = prev + (j + g) * tri[i][j]
        x0 = mpf(tail_base)
        ln = mpf(tail_length)
        total = mpf(0)
        poch = mpf(1)
        for j in range(r + 1):
            if j > 0:
                poch *= mpf(pochhammer_base) + (j - 1)
            coeff = tri[r][j]
            if coeff == 0:
                continue
            sign = 1 if (r - j) % 2 == 0 else -1
            xj = x0 + j * mpf(alpha)
            tail = mp.e ** (loggamma(xj + ln) - loggamma(xj) - loggamma(x0 + ln) + loggamma(x0))
            total += sign * poch * coeff * tail
        return float(total)


@dataclass(frozen=True)
class ParameterBox:
    """Search box for fitting; must sit strictly inside the valid domain."""

    alpha_min: float = 0.01
    alpha_max: float = 0.99
    theta_margin: float = 0.01  # theta lower bound is -alpha + margin
    theta_max: float = 50.0

    def __post_init__(self):
        if not 0.0 < self.alpha_min < self.alpha_max < 1.0:
            raise ValueError("alpha bounds must satisfy 0 < min < max < 1")
        if self.theta_margin <= 0.0:
            raise ValueError("theta_margin must be positive")
        if self.theta_max <= -self.alpha_min + self.theta_margin:
            raise ValueError("theta_max lies below the lower edge")

    def theta_min(self, alpha: float) -> float:
        return -alpha + self.theta_margin


@dataclass(frozen=True)
class FitResult:
    params: PDParams
    log_likelihood: float
    at_boundary: tuple
    history: tuple  # best objective after each search stage, nondecreasing


def fit_params(data: PartitionData, bounds: ParameterBox | None = None,
               tol: float = 1e-8) -> FitResult:
    """Empirical-Bayes point estimate: maximize eppf_log over the box.

    Derivative-free: two refined grid passes then a Nelder-Mead polish.
    Boundary hits (e.g. all-singleton data pushing alpha or theta to the top
    edge) are reported in ``at_boundary``, not hidden.
    """
    if data.k < 2:
        raise ValueError("fit needs at least two species (k >= 2)")
    box = bounds or ParameterBox()

    def objective(alpha: float, theta: float) -> float:
        return eppf_log(PDParams(alpha, theta), data)

    def grid_pass(a_lo, a_hi, t_lo_of, t_hi, na, nt):
        best = (-math.inf, None)
        for a in np.linspace(a_lo, a_hi, na):
            t_lo = t_lo_of(a)
            for t in np.linspace(t_lo, t_hi, nt):
                val = objective(float(a), float(t))
                if val > best[0]:
                    best = (val, (float(a), float(t)))
        return best

    history = []
    best_val, (a0, t0) = grid_pass(
        box.alpha_min, box.alpha_max, box.theta_min, box.theta_max, 25, 25
    )
    history.append(best_val)

    # refine around the coarse optimum, clipped to the box
    da = (box.alpha_max - box.alpha_min) / 24
    dt = (box.theta_max - box.theta_min(a0)) / 24
    a_lo = max(box.alpha_min, a0 - da)
    a_hi = min(box.alpha_max, a0 + da)
    best_val2, (a1, t1) = grid_pass(
        a_lo, a_hi,
        lambda a: max(box.theta_min(a), t0 - dt),
        min(box.theta_max, t0 + dt),
        15, 15,
    )
    if best_val2 < best_val:
        best_val2, (a1, t1) = best_val, (a0, t0)
    history.append(best_val2)

    def neg(xy):
        a, t = xy
        a = min(max(a, box.alpha_min), box.alpha_max)
        t = min(max(t, box.theta_min(a)), box.theta_max)
        return -objective(a, t)

    res = minimize(neg, x0=[a1, t1], method="Nelder-Mead",
                   options={"xatol": tol, "fatol": tol, "maxiter": 2000})
    a2 = min(max(float(res.x[0]), box.alpha_min), box.alpha_max)
    t2 = min(max(float(res.x[1]), box.theta_min(a2)), box.theta_max)
    val2 = objective(a2, t2)
    if val2 < best_val2:
        a2, t2, val2 = a1, t1, best_val2
    history.append(val2)

    edge_tol_a = 1e-3 * (box.alpha_max - box.alpha_min)
    edge_tol_t = 1e-3 * (box.theta_max - box.theta_min(a2))
    edges = []
    if a2 - box.alpha_min <= edge_tol_a:
        edges.append("alpha_min")
    if box.alpha_max - a2 <= edge_tol_a:
        edges.append("alpha_max")
    if t2 - box.theta_min(a2) <= edge_tol_t:
        edges.append("theta_min")
    if box.theta_max - t2 <= edge_tol_t:
        edges.append("theta_max")

    return FitResult(
        params=PDParams(a2, t2),
        log_likelihood=val2,
        at_boundary=tuple(edges),
        history=tuple(history),
    )
