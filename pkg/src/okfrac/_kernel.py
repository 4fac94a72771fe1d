"""Compiled fast path for Monte Carlo trials.

One trial is a single pass over the arrival order. A Fenwick tree over the
canonical density ranks supplies, for each arriving item, the total size of
strictly denser revealed items; that prefix determines the item's fraction in
the optimal solution of the revealed set, so the knapsack phase never sorts.
Items arrive pre-indexed in canonical value order, which reduces the
beats-the-best-sample test to an integer comparison.

No fastmath: float operations keep their program order, so results are
bit-reproducible for a fixed permutation block.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def simulate_block(
    perms,  # (T, n) int64: arrival order of item indices (canonical value order)
    values,  # (n,) float64
    sizes,  # (n,) float64
    density_rank,  # (n,) int64, 1-based rank in canonical density order
    capacity,  # float64
    sampling_end,  # int64: rounds 1..sampling_end observe only
    secretary_end,  # int64: rounds sampling_end+1..secretary_end run the secretary rule
    opt_value,  # float64: offline optimum, ratio denominator
    thresholds,  # (n,) float64: per-item packing-event threshold
    ratios,  # (T,) float64 out
    sec_empty,  # (T,) uint8 out
    first_rank,  # (T,) int64 out: 1-based value rank of first secretary pack, 0 if none
    pack_hits,  # (n,) int64 in/out: event counts over secretary-empty trials
):
    T, n = perms.shape
    tree = np.zeros(n + 1, np.float64)
    fractions = np.zeros(n, np.float64)
    n_empty = 0
    max_overshoot = 0.0
    for t in range(T):
        for k in range(n + 1):
            tree[k] = 0.0
        best = n  # sentinel: any item beats an empty sample
        consumed = 0.0
        alg = 0.0
        first = 0
        for ell in range(n):
            i = perms[t, ell]
            r = density_rank[i]
            while r <= n:
                tree[r] += sizes[i]
                r += r & (-r)
            if ell < sampling_end:
                fractions[i] = 0.0
                if i < best:
                    best = i
            elif ell < secretary_end:
                if i < best:
                    room = capacity - consumed
                    if room < 0.0:
                        room = 0.0
                    take = sizes[i] if sizes[i] <= room else room
                    x = take / sizes[i]
                    fractions[i] = x
                    if x > 0.0 and first == 0:
                        first = i + 1
                    consumed += take
                    alg += values[i] * x
                else:
                    fractions[i] = 0.0
            else:
                denser = 0.0
                r = density_rank[i] - 1
                while r > 0:
                    denser += tree[r]
                    r -= r & (-r)
                free_opt = capacity - denser
                if free_opt < 0.0:
                    free_opt = 0.0
                want = sizes[i] if sizes[i] <= free_opt else free_opt
                room = capacity - consumed
                if room < 0.0:
                    room = 0.0
                take = want if want <= room else room
                x = take / sizes[i]
                fractions[i] = x
                consumed += take
                alg += values[i] * x
            if consumed - capacity > max_overshoot:
                max_overshoot = consumed - capacity
        ratios[t] = alg / opt_value
        first_rank[t] = first
        if first == 0:
            sec_empty[t] = 1
            n_empty += 1
            for j in range(n):
                if fractions[j] >= thresholds[j] - 1e-12:
                    pack_hits[j] += 1
        else:
            sec_empty[t] = 0
    return n_empty, max_overshoot
