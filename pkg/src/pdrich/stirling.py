"""Rising factorials and the three Stirling-type number families.

All triangles are kept in natural-log scale (-inf = exact zero) because the
magnitudes overflow doubles near order 170.  Each family is pinned down by
the connection identity it must satisfy:

* generalized first kind, parameter ``alpha``:
      (x)_n = sum_k S(n,k) * x(x+alpha)...(x+(k-1)alpha)
  recursion  S(n+1,k) = S(n,k-1) + (n - k*alpha) * S(n,k)

* non-central first kind, parameters ``alpha, r``:
      S(m,k) = sum_s C(m,s) (r)_{m-s} S1(s,k)
  recursion  S(m+1,k) = S(m,k-1) + (m + r - k*alpha) * S(m,k)

* non-central second kind (signless), parameter ``gamma``:
      x^n = sum_k S(n,k) * (x-gamma)(x-gamma-1)...(x-gamma-k+1)
  recursion  S(n+1,k) = S(n,k-1) + (k + gamma) * S(n,k)
"""

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .logspace import NEG_INF, SignedLog


def rising_factorial(x: float, b: int) -> SignedLog:
    """(x)_b = x(x+1)...(x+b-1) for any real x; b = 0 gives 1."""
    if b < 0:
        raise ValueError("b must be nonnegative")
    out = SignedLog.one()
    for i in range(b):
        out = out * SignedLog.from_real(x + i)
        if out.sign == 0:
            break
    return out


def gen_rising_factorial(x: float, s: int, alpha: float) -> SignedLog:
    """x(x+alpha)(x+2*alpha)...(x+(s-1)*alpha) for any real x; s = 0 gives 1."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    out = SignedLog.one()
    for i in range(s):
        out = out * SignedLog.from_real(x + i * alpha)
        if out.sign == 0:
            break
    return out


@dataclass(frozen=True)
class LogTable:
    """Immutable triangular array of log-scale nonnegative entries.

    ``logs[n, k]`` holds log S(n,k) for 0 <= k <= n <= nmax; -inf is exact
    zero.  ``family`` tags which recursion built it, with its parameters.
    """

    family: str
    logs: np.ndarray
    alpha: float | None = None
    shift: float | None = None

    @property
    def nmax(self) -> int:
        return self.logs.shape[0] - 1

    def log_entry(self, n: int, k: int) -> float:
        return float(self.logs[n, k])

    def entry(self, n: int, k: int) -> float:
        v = self.logs[n, k]
        return 0.0 if v == NEG_INF else float(math.exp(v))

    def log_row(self, n: int) -> np.ndarray:
        return self.logs[n]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def stirling1_table(nmax: int, alpha: float) -> LogTable:
    """Generalized first-kind triangle up to order nmax."""
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    logs = _freeze(kernels.stirling1_table(nmax, alpha))
    return LogTable("stirling1", logs, alpha=alpha)


def noncentral_stirling1_table(mmax: int, alpha: float, r: float) -> LogTable:
    """Non-central first-kind triangle up to order mmax, shift r > 0."""
    if mmax < 0:
        raise ValueError("mmax must be nonnegative")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if r <= 0:
        raise ValueError(f"shift r must be positive, got {r}")
    logs = _freeze(kernels.noncentral1_table(mmax, alpha, r))
    return LogTable("noncentral_stirling1", logs, alpha=alpha, shift=r)


def noncentral_stirling2_table(rmax: int, gamma: float) -> LogTable:
    """Signless non-central second-kind triangle up to order rmax, shift gamma > 0."""
    if rmax < 0:
        raise ValueError("rmax must be nonnegative")
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    logs = _freeze(kernels.stirling2_table(rmax, gamma))
    return LogTable("noncentral_stirling2", logs, shift=gamma)
