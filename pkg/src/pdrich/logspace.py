"""Log-scale arithmetic for nonnegative and signed magnitudes.

Nonnegative quantities are stored as natural-log magnitudes, with ``-inf``
as the exact-zero sentinel: it annihilates products (``-inf + x == -inf``)
and is the identity of log-space addition.  Quantities that can change sign
(rising factorials of negative arguments) carry an explicit sign in a
:class:`SignedLog`.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

NEG_INF = float("-inf")


def log_add(a: float, b: float) -> float:
    """log(e^a + e^b) by max-shifted summation; never overflows."""
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def log_sum(values) -> float:
    """log of the sum of exponentials of a 1-d array (all-(-inf) -> -inf)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return NEG_INF
    hi = np.max(values)
    if hi == NEG_INF:
        return NEG_INF
    return float(hi + np.log(np.sum(np.exp(values - hi))))


def log_rising(x: float, n: float) -> float:
    """log (x)_n = log Gamma(x+n) - log Gamma(x) for x > 0, x + n > 0.

    n may be any real (used with real increments r*alpha); n = 0 gives 0.
    """
    if n == 0:
        return 0.0
    if x <= 0 or x + n <= 0:
        raise ValueError(f"log_rising needs x > 0 and x + n > 0, got x={x}, n={n}")
    return float(gammaln(x + n) - gammaln(x))


def log_gen_rising(x: float, s: int, step: float) -> float:
    """log of x(x+step)(x+2*step)...(x+(s-1)*step) for x > 0, step > 0.

    Uses the scaling identity (x)_{s, step} = step^s * (x/step)_s.
    """
    if s == 0:
        return 0.0
    if x <= 0:
        raise ValueError(f"log_gen_rising needs x > 0, got {x}")
    if step <= 0:
        raise ValueError(f"log_gen_rising needs step > 0, got {step}")
    return float(s * math.log(step) + gammaln(x / step + s) - gammaln(x / step))


def log_choose(n: int, k: int) -> float:
    if k < 0 or k > n:
        return NEG_INF
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


@dataclass(frozen=True)
class SignedLog:
    """A real number as (log magnitude, sign); sign 0 means exact zero."""

    logmag: float
    sign: int

    @classmethod
    def from_real(cls, x: float) -> "SignedLog":
        if x == 0:
            return cls(NEG_INF, 0)
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    @classmethod
    def one(cls) -> "SignedLog":
        return cls(0.0, 1)

    @classmethod
    def zero(cls) -> "SignedLog":
        return cls(NEG_INF, 0)

    def to_real(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.logmag)

    def __mul__(self, other: "SignedLog") -> "SignedLog":
        sign = self.sign * other.sign
        if sign == 0:
            return SignedLog.zero()
        return SignedLog(self.logmag + other.logmag, sign)

    def scaled(self, log_factor: float) -> "SignedLog":
        """Multiply by a nonnegative factor given as a log magnitude."""
        if self.sign == 0 or log_factor == NEG_INF:
            return SignedLog.zero()
        return SignedLog(self.logmag + log_factor, self.sign)


def signed_log_sum(terms) -> SignedLog:
    """Exact-in-log sum of SignedLog terms via max-shifted accumulation."""
    logs = np.array([t.logmag for t in terms], dtype=float)
    signs = np.array([t.sign for t in terms], dtype=float)
    live = signs != 0
    if not np.any(live):
        return SignedLog.zero()
    logs, signs = logs[live], signs[live]
    hi = float(np.max(logs))
    total = float(np.sum(signs * np.exp(logs - hi)))
    if total == 0.0:
        return SignedLog.zero()
    return SignedLog(hi + math.log(abs(total)), 1 if total > 0 else -1)
