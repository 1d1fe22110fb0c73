"""Exact-rational brute force for desk-scale instances.

Everything here runs on Fractions -- no floats -- so the other modules can be
tested against values that are beyond numerical doubt.  Set partitions are
enumerated through restricted growth strings; conditional laws by seating
additional customers one at a time with exact one-step probabilities.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

ENUMERATION_CAP = 12  # Bell(12) = 4,213,597


@dataclass(frozen=True)
class RationalParams:
    """Exact parameter pair; denominators bounded to keep products small."""

    alpha: Fraction
    theta: Fraction
    max_denominator: int = 1_000_000

    def __post_init__(self):
        alpha = Fraction(self.alpha)
        theta = Fraction(self.theta)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "theta", theta)
        if not 0 < alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        if not theta + alpha > 0:
            raise ValueError(f"theta must exceed -alpha, got {theta}")
        if alpha.denominator > self.max_denominator or theta.denominator > self.max_denominator:
            raise ValueError("parameter denominator exceeds the configured bound")


def enumerate_partitions(n: int, cap: int = ENUMERATION_CAP):
    """Yield every set partition of {1, ..., n} exactly once.

    Blocks are tuples ordered by least element; generated from restricted
    growth strings, so there are no duplicates by construction.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > cap:
        raise ValueError(f"n={n} exceeds the enumeration cap {cap}")

    def walk(rgs, maxlabel):
        i = len(rgs)
        if i == n:
            blocks = [[] for _ in range(maxlabel + 1)]
            for pos, label in enumerate(rgs):
                blocks[label].append(pos + 1)
            yield tuple(tuple(b) for b in blocks)
            return
        for label in range(maxlabel + 2):
            yield from walk(rgs + [label], max(maxlabel, label))

    yield from walk([0], 0)


def _rising(x: Fraction, b: int) -> Fraction:
    out = Fraction(1)
    for i in range(b):
        out *= x + i
    return out


def _gen_rising(x: Fraction, s: int, step: Fraction) -> Fraction:
    out = Fraction(1)
    for i in range(s):
        out *= x + i * step
    return out


def exact_eppf(params: RationalParams, counts) -> Fraction:
    """Exact probability of one specific set partition with the given block sizes."""
    counts = [int(c) for c in counts]
    n, k = sum(counts), len(counts)
    a, th = params.alpha, params.theta
    weight = _gen_rising(th + a, k - 1, a) / _rising(th + 1, n - 1)
    for c in counts:
        weight *= _rising(1 - a, c - 1)
    return weight


def exact_kn_pmf(params: RationalParams, n: int, cap: int = ENUMERATION_CAP) -> dict:
    """Exact species-count law {k: P(K_n = k)} by full partition enumeration."""
    if n > cap:
        raise ValueError(f"n={n} exceeds the enumeration cap {cap}")
    masses: dict[int, Fraction] = {}
    for blocks in enumerate_partitions(n, cap):
        k = len(blocks)
        masses[k] = masses.get(k, Fraction(0)) + exact_eppf(
            params, [len(b) for b in blocks]
        )
    return masses


@dataclass(frozen=True)
class ExactConditional:
    """Exact conditional continuation laws for a pilot configuration.

    ``joint[j][s]`` is P(K_m = j, S_m = s | pilot); ``pmf[j]`` its K_m
    margin, ``sm[s]`` its S_m margin.
    """

    pmf: tuple
    joint: tuple

    @property
    def sm(self) -> tuple:
        m = len(self.pmf) - 1
        return tuple(
            sum(self.joint[j][s] for j in range(m + 1)) for s in range(m + 1)
        )

    def given_sm(self, s: int) -> tuple:
        """P(K_m = j | S_m = s) for j = 0..s; None if the stratum has mass 0."""
        mass = sum(self.joint[j][s] for j in range(len(self.pmf)))
        if mass == 0:
            return None
        return tuple(self.joint[j][s] / mass for j in range(s + 1))


def exact_km_pmf(params: RationalParams, pilot_counts, m: int,
                 cap: int = ENUMERATION_CAP) -> ExactConditional:
    """Exact law of (K_m, S_m) given a pilot with the stated multiplicities.

    Seats the m additional customers one at a time with exact one-step
    probabilities, summing over all continuation trajectories (memoized on
    the size multisets, so equal-(n,k) pilots provably agree).
    """
    pilot = tuple(int(c) for c in pilot_counts)
    if any(c < 1 for c in pilot) or len(pilot) == 0:
        raise ValueError("pilot counts must be positive and nonempty")
    n = sum(pilot)
    if n + m > cap:
        raise ValueError(f"n+m={n + m} exceeds the enumeration cap {cap}")
    a, th = params.alpha, params.theta

    @lru_cache(maxsize=None)
    def walk(old, new, left):
        if left == 0:
            return {(len(new), sum(new)): Fraction(1)}
        ntot = sum(old) + sum(new)
        denom = th + ntot
        out: dict[tuple, Fraction] = {}

        def absorb(sub, p):
            for key, q in sub.items():
                out[key] = out.get(key, Fraction(0)) + p * q

        for sizes, is_new in ((old, False), (new, True)):
            seen = {}
            for s in sizes:
                seen[s] = seen.get(s, 0) + 1
            for size, mult in seen.items():
                p = mult * (size - a) / denom
                grown = list(sizes)
                grown.remove(size)
                grown.append(size + 1)
                nxt = tuple(sorted(grown))
                sub = (
                    walk(old, nxt, left - 1) if is_new else walk(nxt, new, left - 1)
                )
                absorb(sub, p)
        k_all = len(old) + len(new)
        p_new = (th + k_all * a) / denom
        absorb(walk(old, tuple(sorted(new + (1,))), left - 1), p_new)
        return out

    dist = walk(tuple(sorted(pilot)), (), m)
    joint = [[Fraction(0)] * (m + 1) for _ in range(m + 1)]
    for (j, s), p in dist.items():
        joint[j][s] = p
    pmf = tuple(sum(row) for row in joint)
    return ExactConditional(pmf=pmf, joint=tuple(tuple(row) for row in joint))


def exact_sm_pmf(params: RationalParams, n: int, k: int, m: int) -> tuple:
    """Exact Beta-Binomial law of S_m: closed form, independent of enumeration."""
    a, th = params.alpha, params.theta
    out = []
    denom = _rising(th + n, m)
    for s in range(m + 1):
        binom = Fraction(1)
        for i in range(s):
            binom = binom * (m - i) / (i + 1)
        out.append(binom * _rising(n - k * a, m - s) * _rising(th + k * a, s) / denom)
    return tuple(out)
