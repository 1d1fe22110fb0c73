"""Pure-Python implementations of the hot kernels.

Mirrors the compiled ``_kernels`` extension exactly: same signatures, same
arithmetic in the same order, so either backend can serve the rest of the
package.  Table builders are numpy-vectorized per row; the seating loops are
plain Python and consume pre-drawn uniforms in a fixed order so results are
reproducible (and bit-identical to the compiled backend) for a given seed.

All tables are natural-log scale with -inf as exact zero.
"""

import numpy as np

NEG_INF = float("-inf")


def _row_update(prev: np.ndarray, coeff: np.ndarray) -> np.ndarray:
    """new[k] = logadd(prev[k-1], log(coeff[k]) + prev[k]) for one row.

    A nonpositive coefficient annihilates its term (it only occurs where the
    recursion multiplies by an exact zero).
    """
    shifted = np.concatenate(([NEG_INF], prev[:-1]))
    dead = (prev == NEG_INF) | (coeff <= 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(dead, NEG_INF, np.log(np.where(dead, 1.0, coeff)) + prev)
    return np.logaddexp(shifted, scaled)


def stirling1_table(nmax: int, alpha: float) -> np.ndarray:
    """Generalized first-kind triangle: S[n+1,k] = S[n,k-1] + (n - k*alpha)*S[n,k]."""
    table = np.full((nmax + 1, nmax + 1), NEG_INF)
    table[0, 0] = 0.0
    ks = np.arange(nmax + 1, dtype=float)
    for n in range(nmax):
        table[n + 1] = _row_update(table[n], n - ks * alpha)
    return table


def noncentral1_table(mmax: int, alpha: float, r: float) -> np.ndarray:
    """Non-central first-kind triangle: S[m+1,k] = S[m,k-1] + (m + r - k*alpha)*S[m,k]."""
    table = np.full((mmax + 1, mmax + 1), NEG_INF)
    table[0, 0] = 0.0
    ks = np.arange(mmax + 1, dtype=float)
    for m in range(mmax):
        table[m + 1] = _row_update(table[m], m + r - ks * alpha)
    return table


def noncentral1_row(m: int, alpha: float, r: float) -> np.ndarray:
    """Row m of the non-central first-kind triangle, O(m) rolling memory."""
    row = np.full(m + 1, NEG_INF)
    row[0] = 0.0
    ks = np.arange(m + 1, dtype=float)
    for i in range(m):
        row = _row_update(row, i + r - ks * alpha)
    return row


def stirling2_table(rmax: int, gamma: float) -> np.ndarray:
    """Signless non-central second-kind triangle: S[n+1,k] = S[n,k-1] + (k + gamma)*S[n,k]."""
    table = np.full((rmax + 1, rmax + 1), NEG_INF)
    table[0, 0] = 0.0
    ks = np.arange(rmax + 1, dtype=float)
    for n in range(rmax):
        coeff = ks + gamma
        table[n + 1] = _row_update(table[n], coeff)
    return table


def _seat(sizes: list, ntot: int, alpha: float, theta: float, u: float) -> int:
    """Seat one customer; returns the joined block index, or -1 for a new block."""
    t = u * (theta + ntot)
    acc = 0.0
    for j in range(len(sizes)):
        acc += sizes[j] - alpha
        if t < acc:
            return j
    return -1


def crp_kn_batch(alpha: float, theta: float, n: int, u: np.ndarray) -> np.ndarray:
    """Number of blocks after seating n customers, one row of uniforms per run."""
    runs = u.shape[0]
    out = np.empty(runs, dtype=np.int64)
    for i in range(runs):
        sizes = [1]
        ntot = 1
        row = u[i]
        for step in range(n - 1):
            j = _seat(sizes, ntot, alpha, theta, row[step])
            if j < 0:
                sizes.append(1)
            else:
                sizes[j] += 1
            ntot += 1
        out[i] = len(sizes)
    return out


def crp_sizes_batch(alpha: float, theta: float, n: int, u: np.ndarray):
    """Seat n customers per run; returns (block-size matrix, block counts)."""
    runs = u.shape[0]
    sizes_out = np.zeros((runs, n), dtype=np.int64)
    k_out = np.empty(runs, dtype=np.int64)
    for i in range(runs):
        sizes = [1]
        ntot = 1
        row = u[i]
        for step in range(n - 1):
            j = _seat(sizes, ntot, alpha, theta, row[step])
            if j < 0:
                sizes.append(1)
            else:
                sizes[j] += 1
            ntot += 1
        k_out[i] = len(sizes)
        sizes_out[i, : len(sizes)] = sizes
    return sizes_out, k_out


def continue_counts_fixed(base_sizes: np.ndarray, alpha: float, theta: float,
                          m: int, u: np.ndarray):
    """Continue seating m customers from one fixed state, one run per row of u.

    Returns (new-block count, new-block occupancy) per run.
    """
    runs = u.shape[0]
    k0 = len(base_sizes)
    n0 = int(np.sum(base_sizes))
    base = [int(s) for s in base_sizes]
    knew = np.empty(runs, dtype=np.int64)
    snew = np.empty(runs, dtype=np.int64)
    for i in range(runs):
        sizes = list(base)
        ntot = n0
        kn = 0
        sn = 0
        row = u[i]
        for step in range(m):
            j = _seat(sizes, ntot, alpha, theta, row[step])
            if j < 0:
                sizes.append(1)
                kn += 1
                sn += 1
            else:
                sizes[j] += 1
                if j >= k0:
                    sn += 1
            ntot += 1
        knew[i] = kn
        snew[i] = sn
    return knew, snew


def continue_counts_var(base_sizes: np.ndarray, base_k: np.ndarray, alpha: float,
                        theta: float, m: int, u: np.ndarray):
    """Like continue_counts_fixed but with a per-run base state (row i, first base_k[i] sizes)."""
    runs = u.shape[0]
    knew = np.empty(runs, dtype=np.int64)
    snew = np.empty(runs, dtype=np.int64)
    for i in range(runs):
        k0 = int(base_k[i])
        sizes = [int(s) for s in base_sizes[i, :k0]]
        ntot = sum(sizes)
        kn = 0
        sn = 0
        row = u[i]
        for step in range(m):
            j = _seat(sizes, ntot, alpha, theta, row[step])
            if j < 0:
                sizes.append(1)
                kn += 1
                sn += 1
            else:
                sizes[j] += 1
                if j >= k0:
                    sn += 1
            ntot += 1
        knew[i] = kn
        snew[i] = sn
    return knew, snew


def continue_single(base_sizes: np.ndarray, alpha: float, theta: float,
                    m: int, u: np.ndarray):
    """One continuation run; returns (new blocks, new occupancy, final sizes)."""
    k0 = len(base_sizes)
    sizes = [int(s) for s in base_sizes]
    ntot = sum(sizes)
    kn = 0
    sn = 0
    for step in range(m):
        j = _seat(sizes, ntot, alpha, theta, u[step])
        if j < 0:
            sizes.append(1)
            kn += 1
            sn += 1
        else:
            sizes[j] += 1
            if j >= k0:
                sn += 1
        ntot += 1
    return kn, sn, np.array(sizes, dtype=np.int64)
