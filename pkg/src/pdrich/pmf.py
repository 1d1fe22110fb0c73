"""Finite probability mass function over a contiguous integer support."""

import math
from dataclasses import dataclass

import numpy as np

from .logspace import NEG_INF

_SUM_TOL = 1e-10


@dataclass(frozen=True)
class Pmf:
    """Probabilities stored as natural logs (-inf = exact zero).

    The support is ``support_min, support_min+1, ..., support_min+len-1``.
    Masses must sum to 1 within 1e-10; log entries may exceed 0 only by
    float dust, which is clamped.
    """

    support_min: int
    log_probs: np.ndarray

    def __post_init__(self):
        logs = np.asarray(self.log_probs, dtype=float)
        if logs.ndim != 1 or logs.size == 0:
            raise ValueError("log_probs must be a nonempty 1-d array")
        if np.any(logs > 1e-12):
            raise ValueError("pmf entry exceeds 1")
        logs = np.minimum(logs, 0.0)
        logs.setflags(write=False)
        object.__setattr__(self, "log_probs", logs)
        total = float(np.sum(self.probs))
        if not math.isfinite(total) or abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"pmf masses sum to {total!r}, not 1")

    @property
    def probs(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_probs)

    @property
    def support(self) -> np.ndarray:
        return self.support_min + np.arange(len(self.log_probs))

    @property
    def support_max(self) -> int:
        return self.support_min + len(self.log_probs) - 1

    def prob(self, value: int) -> float:
        idx = value - self.support_min
        if idx < 0 or idx >= len(self.log_probs):
            return 0.0
        lp = self.log_probs[idx]
        return 0.0 if lp == NEG_INF else float(math.exp(lp))

    def mean(self) -> float:
        return float(np.sum(self.support * self.probs))

    def moment(self, r: int) -> float:
        return float(np.sum(self.support.astype(float) ** r * self.probs))

    def mass_between(self, lo: int, hi: int) -> float:
        """Total mass on the integer range [lo, hi]."""
        a = max(lo, self.support_min) - self.support_min
        b = min(hi, self.support_max) - self.support_min
        if b < a:
            return 0.0
        return float(np.sum(self.probs[a : b + 1]))


def point_mass(value: int) -> Pmf:
    return Pmf(value, np.zeros(1))


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance between two pmf vectors on a common support."""
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))
