"""Dominance-counting kernels.

Two strategies are provided.

``orthant_counts_onepass``
    A compiled loop over all ordered pairs ``(i, k)``.  For each pair it
    forms the bitmask ``g`` of coordinates where ``X[k] > X[i]`` and the
    bitmask ``e`` of tied coordinates.  A sign pattern ``s`` (bit ``m`` set
    means coordinate ``m`` is negated) counts the pair exactly when ``g``
    is a subset of ``s`` and ``s`` is a subset of ``g | e``, so the kernel
    walks the submasks of ``e`` and bumps one tally per admissible pattern.
    The diagonal pair has ``e`` equal to all coordinates and is therefore
    counted by every pattern.

``dominance_counts_bitset`` / ``orthant_counts_bitset``
    Packed-bitset versions.  For every coordinate the set
    ``{k : X[k, m] <= X[i, m]}`` is a prefix of the sorted order (extended
    through ties), so one cumulative OR over a one-hot matrix yields all
    ``n`` sets.  The dominance set of point ``i`` is the AND of its ``d``
    coordinate sets and the count is a popcount.  These are still quadratic
    but move 64 comparisons per machine word, which makes them the fast path
    for Monte Carlo loops.
"""

import numpy as np
from numba import njit

__all__ = [
    "orthant_counts_onepass",
    "dominance_counts_bitset",
    "orthant_counts_bitset",
    "bitset_bytes",
]


@njit(cache=True, nogil=True)
def _onepass(X):
    n, d = X.shape
    n_patterns = 1 << d
    counts = np.zeros((n, n_patterns), dtype=np.int64)
    for i in range(n):
        for k in range(n):
            g = 0
            e = 0
            for m in range(d):
                a = X[k, m]
                b = X[i, m]
                if a > b:
                    g |= 1 << m
                elif a == b:
                    e |= 1 << m
            sub = e
            while True:
                counts[i, g | sub] += 1
                if sub == 0:
                    break
                sub = (sub - 1) & e
    return counts


def orthant_counts_onepass(X):
    """Dominance counts for every sign pattern in one pass over all pairs.

    Parameters
    ----------
    X : ndarray of shape (n, d)
        Finite observations.

    Returns
    -------
    ndarray of shape (n, 2**d), int64
        ``counts[i, s]`` is the number of ``k`` (``i`` included) whose
        pattern-``s`` reflection is componentwise ``<=`` that of ``i``.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    return _onepass(X)


def _prefix_sets(col, words):
    """Packed sets ``{k : col[k] <= col[i]}`` and ``{k : col[k] >= col[i]}``."""
    n = col.shape[0]
    order = np.argsort(col, kind="stable")
    onehot = np.zeros((n, words), dtype=np.uint64)
    onehot[np.arange(n), order >> 6] = np.left_shift(
        np.uint64(1), (order & 63).astype(np.uint64)
    )
    sorted_col = col[order]
    le = np.bitwise_or.accumulate(onehot, axis=0)
    le_rows = np.searchsorted(sorted_col, col, side="right") - 1
    ge = np.bitwise_or.accumulate(onehot[::-1], axis=0)[::-1]
    ge_rows = np.searchsorted(sorted_col, col, side="left")
    return le, le_rows, ge, ge_rows


def bitset_bytes(n, d, all_patterns=False):
    """Approximate peak memory of the bitset kernels in bytes."""
    words = (n + 63) // 64
    per_matrix = n * words * 8
    return per_matrix * (2 * d + d + 2 if all_patterns else 3)


def dominance_counts_bitset(X):
    """Counts ``#{k : X[k] <= X[i] componentwise}`` for each ``i`` (self included).

    Parameters
    ----------
    X : ndarray of shape (n, d)

    Returns
    -------
    ndarray of shape (n,), int64
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    words = (n + 63) // 64
    acc = None
    idx = np.arange(n)
    for m in range(d):
        col = X[:, m]
        order = np.argsort(col, kind="stable")
        onehot = np.zeros((n, words), dtype=np.uint64)
        onehot[idx, order >> 6] = np.left_shift(
            np.uint64(1), (order & 63).astype(np.uint64)
        )
        np.bitwise_or.accumulate(onehot, axis=0, out=onehot)
        rows = onehot[np.searchsorted(col[order], col, side="right") - 1]
        if acc is None:
            acc = rows
        else:
            np.bitwise_and(acc, rows, out=acc)
    return np.bitwise_count(acc).sum(axis=1, dtype=np.int64)


def orthant_counts_bitset(X):
    """Bitset version of :func:`orthant_counts_onepass` (identical output).

    The ``2**d`` patterns are visited depth first so only ``d`` partial
    intersections are alive at any time.
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    words = (n + 63) // 64
    sets = []
    for m in range(d):
        le, le_rows, ge, ge_rows = _prefix_sets(X[:, m], words)
        sets.append((le[le_rows], ge[ge_rows]))
    counts = np.empty((n, 1 << d), dtype=np.int64)

    def visit(m, pattern, partial):
        for bit, block in ((0, sets[m][0]), (1, sets[m][1])):
            cur = block if partial is None else partial & block
            code = pattern | (bit << m)
            if m + 1 == d:
                counts[:, code] = np.bitwise_count(cur).sum(axis=1, dtype=np.int64)
            else:
                visit(m + 1, code, cur)

    visit(0, 0, None)
    return counts
