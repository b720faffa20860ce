"""Compiled inner loops for the subsampling bootstrap.

Each replicate reseeds the (thread-local) numba generator from its own
derived seed, so the output does not depend on how replicates are spread
over threads.

The sample is pre-sorted by x and y is replaced by its dense rank, so a
subsample is x-ordered once its positions are sorted. Small subsamples
sort their positions (O(m log m)); large ones scan a membership mask and
rank y by counting (O(n)), whichever is cheaper.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _xi_from_ranks(r, l, ties):
    m = r.size
    jumps = 0
    for k in range(m - 1):
        jumps += abs(r[k + 1] - r[k])
    if not ties:
        return 1.0 - 3.0 * jumps / (m * m - 1.0)
    den = 0
    for k in range(m):
        den += l[k] * (m - l[k])
    if den == 0:
        return np.nan
    return 1.0 - (m * jumps) / (2.0 * den)


@njit(cache=True, nogil=True)
def _ranks_by_sorting(yo, r, l):
    return _ranks_from_order(yo, np.argsort(yo), r, l)


@njit(cache=True, nogil=True)
def _ranks_from_order(yo, order, r, l):
    # order sorts yo ascending; equal values form contiguous runs
    m = yo.size
    ties = False
    i = 0
    while i < m:
        v = yo[order[i]]
        j = i
        while j + 1 < m and yo[order[j + 1]] == v:
            j += 1
        if j > i:
            ties = True
        for k in range(i, j + 1):
            r[order[k]] = j + 1
            l[order[k]] = m - i
        i = j + 1
    return ties


@njit(cache=True, nogil=True)
def _ranks_by_counting(yo, counts, r, l):
    # yo holds dense ranks in [0, counts.size)
    m = yo.size
    counts[:] = 0
    for k in range(m):
        counts[yo[k]] += 1
    ties = False
    below = 0
    for v in range(counts.size):
        c = counts[v]
        if c > 1:
            ties = True
        # reuse counts[v] as "number of values < v"
        counts[v] = below
        below += c
    for k in range(m):
        lo = counts[yo[k]]
        v = yo[k]
        hi = counts[v + 1] if v + 1 < counts.size else m
        r[k] = hi
        l[k] = m - lo
    return ties


@njit(cache=True, nogil=True)
def rank_profile(yo, order):
    """(r, l, has_ties) for y values arranged in x-order; ``order`` sorts yo."""
    m = yo.size
    r = np.empty(m, np.int64)
    l = np.empty(m, np.int64)
    ties = _ranks_from_order(yo, order, r, l)
    return r, l, ties


@njit(cache=True, nogil=True)
def xi_from_ordered_y(yo):
    """xi of a sample whose y values are already arranged in x-order.

    Returns NaN when all y values are equal.
    """
    m = yo.size
    r = np.empty(m, np.int64)
    l = np.empty(m, np.int64)
    ties = _ranks_by_sorting(yo, r, l)
    return _xi_from_ranks(r, l, ties)


@njit(cache=True, nogil=True)
def _floyd_sample(n, m, mask, out):
    # Floyd's algorithm: m distinct indices from range(n) in m draws.
    k = 0
    for j in range(n - m, n):
        t = np.random.randint(0, j + 1)
        if mask[t]:
            t = j
        mask[t] = True
        out[k] = t
        k += 1


@njit(cache=True, nogil=True)
def _shuffle_x_ties(xo, yo):
    m = xo.size
    i = 0
    while i < m:
        j = i + 1
        while j < m and xo[j] == xo[i]:
            j += 1
        # Fisher-Yates on the block [i, j)
        for k in range(j - 1, i, -1):
            t = i + np.random.randint(0, k - i + 1)
            tmp = yo[k]
            yo[k] = yo[t]
            yo[t] = tmp
        i = j


@njit(cache=True, nogil=True)
def subsample_xi_block(x_sorted, y_dense, n_levels, m, seeds, start, stop, max_retries, out, attempts):
    """Fill ``out[start:stop]`` with xi of valid size-m subsamples.

    ``x_sorted`` is ascending and ``y_dense`` holds the matching dense ranks
    of y. A subsample is valid when its y values are not all equal; invalid
    draws are redrawn up to ``max_retries`` times, after which NaN is
    stored. ``attempts[b]`` records the number of draws used by replicate b.
    """
    n = x_sorted.size
    use_scan = m * np.log2(m) > n
    mask = np.zeros(n, np.bool_)
    idx = np.empty(m, np.int64)
    xo = np.empty(m, np.float64)
    yo = np.empty(m, np.int64)
    r = np.empty(m, np.int64)
    l = np.empty(m, np.int64)
    counts = np.zeros(n_levels if use_scan else 1, np.int64)
    for b in range(start, stop):
        np.random.seed(seeds[b])
        out[b] = np.nan
        attempts[b] = max_retries + 1
        for attempt in range(max_retries + 1):
            _floyd_sample(n, m, mask, idx)
            if use_scan:
                k = 0
                for p in range(n):
                    if mask[p]:
                        mask[p] = False
                        idx[k] = p
                        k += 1
            else:
                for k in range(m):
                    mask[idx[k]] = False
                idx.sort()
            constant = True
            y0 = y_dense[idx[0]]
            for k in range(m):
                xo[k] = x_sorted[idx[k]]
                yo[k] = y_dense[idx[k]]
                if yo[k] != y0:
                    constant = False
            if constant:
                continue
            _shuffle_x_ties(xo, yo)
            if use_scan:
                ties = _ranks_by_counting(yo, counts, r, l)
            else:
                ties = _ranks_by_sorting(yo, r, l)
            out[b] = _xi_from_ranks(r, l, ties)
            attempts[b] = attempt + 1
            break
