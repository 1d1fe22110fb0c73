"""Forward simulation of the two-parameter seating process.

Customer n'+1 founds a new block with probability (theta + k'*alpha)/(theta + n')
and joins an existing block of size n_j with probability (n_j - alpha)/(theta + n').
These one-step probabilities factorize the partition law exactly, which the
test suite checks symbolically against the rational oracle.

Uniform variates are pre-drawn in fixed order from a seeded Generator, so a
given (seed, run count) reproduces exactly on either kernel backend.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .backend import kernels
from .prior import PDParams, kn_pmf

_BATCH = 32_768


@dataclass(frozen=True)
class SeatState:
    """Block sizes of a partially observed sample."""

    block_sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        if len(sizes) == 0 or any(s < 1 for s in sizes):
            raise ValueError("block sizes must be positive and nonempty")
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def n(self) -> int:
        return sum(self.block_sizes)

    @property
    def k(self) -> int:
        return len(self.block_sizes)


@dataclass(frozen=True)
class ContinueResult:
    k_new: int
    s_new: int
    state: SeatState


def crp_sample(params: PDParams, n: int, seed: int) -> SeatState:
    """Seat n customers sequentially; returns the final block sizes."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.random((1, max(n - 1, 1)))
    sizes, _ = kernels.crp_sizes_batch(params.alpha, params.theta, n, u)
    row = sizes[0]
    return SeatState(tuple(int(s) for s in row[row > 0]))


def continue_sample(state: SeatState, params: PDParams, m: int, seed: int) -> ContinueResult:
    """Seat m further customers from ``state`` by the same rule."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return ContinueResult(0, 0, state)
    rng = np.random.default_rng(seed)
    u = rng.random(m)
    base = np.asarray(state.block_sizes, dtype=np.int64)
    k_new, s_new, sizes = kernels.continue_single(base, params.alpha, params.theta, m, u)
    return ContinueResult(int(k_new), int(s_new), SeatState(tuple(int(s) for s in sizes)))


def crp_kn_batch(params: PDParams, n: int, runs: int, seed: int) -> np.ndarray:
    """Block counts K_n over independent runs (memory-light batch)."""
    rng = np.random.default_rng(seed)
    out = np.empty(runs, dtype=np.int64)
    done = 0
    while done < runs:
        b = min(_BATCH, runs - done)
        u = rng.random((b, max(n - 1, 1)))
        out[done : done + b] = kernels.crp_kn_batch(params.alpha, params.theta, n, u)
        done += b
    return out


def continue_batch(state: SeatState, params: PDParams, m: int, runs: int, seed: int):
    """(k_new, s_new) over independent continuations of one fixed state."""
    rng = np.random.default_rng(seed)
    base = np.asarray(state.block_sizes, dtype=np.int64)
    ks = np.empty(runs, dtype=np.int64)
    ss = np.empty(runs, dtype=np.int64)
    done = 0
    while done < runs:
        b = min(_BATCH, runs - done)
        u = rng.random((b, max(m, 1)))
        kn, sn = kernels.continue_counts_fixed(base, params.alpha, params.theta, m, u)
        ks[done : done + b] = kn
        ss[done : done + b] = sn
        done += b
    return ks, ss


class ConditioningBudgetExceeded(RuntimeError):
    """Rejection conditioning on K_n = k used up its attempt budget."""


class InsufficientStratumSamples(RuntimeError):
    """A chi-square stratum received fewer samples than the configured floor."""


def conditioned_continue_batch(params: PDParams, n: int, k: int, m: int, runs: int,
                               seed: int, max_attempts: int = 20_000_000):
    """(k_new, s_new) over ``runs`` continuations conditioned on K_n = k.

    Conditioning is by rejection: pilot samples are resimulated until their
    block count hits k, within ``max_attempts`` pilot draws total.
    """
    rng = np.random.default_rng(seed)
    ks = np.empty(runs, dtype=np.int64)
    ss = np.empty(runs, dtype=np.int64)
    done = 0
    attempts = 0
    while done < runs:
        if attempts >= max_attempts:
            raise ConditioningBudgetExceeded(
                f"conditioning on K_{n}={k} used {attempts} pilot draws "
                f"for {done}/{runs} accepted runs"
            )
        u = rng.random((_BATCH, max(n - 1, 1)))
        sizes, kv = kernels.crp_sizes_batch(params.alpha, params.theta, n, u)
        attempts += _BATCH
        keep = np.flatnonzero(kv == k)[: runs - done]
        if keep.size == 0:
            continue
        base = np.ascontiguousarray(sizes[keep])
        u2 = rng.random((keep.size, max(m, 1)))
        kn, sn = kernels.continue_counts_var(
            base, kv[keep], params.alpha, params.theta, m, u2
        )
        ks[done : done + keep.size] = kn
        ss[done : done + keep.size] = sn
        done += keep.size
    return ks, ss


@dataclass(frozen=True)
class StratumResult:
    s: int
    count: int
    p_value: float
    dof: int
    trivial: bool


@dataclass(frozen=True)
class DeletionReport:
    """Stratified goodness-of-fit of the conditional new-species law.

    Within each stratum S_m = s the simulated K_m counts are chi-square
    tested against the shifted-parameter species-count law; cells with
    expected count < 5 are merged into the tails.
    """

    strata: tuple
    significance: float
    runs: int
    null_theta: float

    @property
    def rejected(self) -> tuple:
        return tuple(r.s for r in self.strata if not r.trivial and r.p_value < self.significance)

    @property
    def passed(self) -> bool:
        return len(self.rejected) == 0


def _merge_small_cells(observed: np.ndarray, expected: np.ndarray, floor: float = 5.0):
    """Merge adjacent cells until every expected count reaches the floor."""
    obs = list(observed.astype(float))
    exp = list(expected.astype(float))
    i = 0
    while i < len(exp):
        if exp[i] >= floor or len(exp) == 1:
            i += 1
            continue
        j = i + 1 if i + 1 < len(exp) else i - 1
        obs[j] += obs[i]
        exp[j] += exp[i]
        del obs[i], exp[i]
        if j < i:
            i = j
    return np.array(obs), np.array(exp)


def deletion_check(params: PDParams, n: int, k: int, m: int, runs: int, seed: int,
                   significance: float = 0.001, null_theta: float | None = None,
                   min_stratum: int = 30, max_attempts: int = 20_000_000) -> DeletionReport:
    """Stratified chi-square test of the class-deletion characterization.

    Simulates ``runs`` continuations conditioned on K_n = k, stratifies by
    S_m = s, and tests each stratum's K_m counts against the species-count
    law at sample size s under (alpha, theta + k*alpha).  Passing
    ``null_theta`` swaps in a different theta for the null (the wrong-null
    power control uses the unshifted theta).
    """
    exact = kn_pmf(params, n)
    if exact.prob(k) < 1e-6:
        raise ValueError(f"P(K_{n}={k}) is negligibly small; conditioning would starve")
    theta_null = params.theta + k * params.alpha if null_theta is None else null_theta
    kvals, svals = conditioned_continue_batch(
        params, n, k, m, runs, seed, max_attempts=max_attempts
    )
    strata = []
    for s in range(m + 1):
        sel = kvals[svals == s]
        count = int(sel.size)
        if count == 0:
            continue
        if s <= 1:
            # degenerate stratum: K_m is forced to s
            ok = bool(np.all(sel == s))
            strata.append(StratumResult(s, count, 1.0 if ok else 0.0, 0, True))
            continue
        if count < min_stratum:
            raise InsufficientStratumSamples(
                f"stratum S_m={s} has {count} samples, below the floor {min_stratum}"
            )
        # null: species-count law of an s-sample at theta_null (support {1..s})
        null = kn_pmf(PDParams(params.alpha, theta_null), s)
        observed = np.bincount(sel, minlength=s + 1).astype(float)[1:]
        expected = null.probs * count
        obs, exp = _merge_small_cells(observed, expected)
        if len(obs) < 2:
            strata.append(StratumResult(s, count, 1.0, 0, True))
            continue
        stat, p = stats.chisquare(obs, exp * (obs.sum() / exp.sum()))
        strata.append(StratumResult(s, count, float(p), len(obs) - 1, False))
    return DeletionReport(tuple(strata), significance, runs, float(theta_null))
