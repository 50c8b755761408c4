"""Slow, independent reference implementations used only by the tests.

Nothing here shares code with the package beyond the field tables, which
have their own axiom tests.
"""

from itertools import combinations, product

import numpy as np


def span_size(F, cols) -> int:
    """Number of distinct vectors in the span of ``cols`` (each a length-r sequence)."""
    cols = [np.asarray(c, dtype=np.int64) for c in cols]
    if not cols:
        return 1
    r = len(cols[0])
    seen = set()
    for coeffs in product(range(F.q), repeat=len(cols)):
        v = np.zeros(r, dtype=np.int64)
        for a, c in zip(coeffs, cols):
            v = F.add_table[v, F.mul_table[a, c]]
        seen.add(tuple(int(x) for x in v))
    return len(seen)


def brute_rank(F, A, idx=None) -> int:
    """Rank as log_q of the span size; exponential, for tiny inputs only."""
    A = np.asarray(A)
    idx = range(A.shape[1]) if idx is None else idx
    size = span_size(F, [A[:, j] for j in idx])
    r = 0
    while F.q**r < size:
        r += 1
    return r


def prime_rank(p: int, A) -> int:
    """Gaussian elimination over the integers mod a prime p."""
    A = [[int(x) % p for x in row] for row in np.asarray(A)]
    if not A:
        return 0
    rows, cols = len(A), len(A[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], p - 2, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        r += 1
    return r


def brute_circuits(rank_fn, n: int) -> set[frozenset]:
    """Minimal dependent subsets of range(n), given a rank function on index lists."""
    dependent = []
    for k in range(1, n + 1):
        for S in combinations(range(n), k):
            if rank_fn(list(S)) < k and not any(D <= set(S) for D in dependent):
                dependent.append(frozenset(S))
    return set(dependent)


def matroid_rank_fn(M):
    """Rank oracle for a LinearMatroid built from its raw entries."""
    A = np.asarray(M.rep.entries)
    if M.field.is_prime:
        return lambda S: prime_rank(M.q, A[:, S]) if S else 0
    return lambda S: brute_rank(M.field, A, S)


def labelled_circuits(M) -> set[frozenset]:
    return {frozenset(M.labels[i] for i in C) for C in brute_circuits(matroid_rank_fn(M), M.n)}


def brute_girth_through(M, e):
    cs = [len(C) for C in labelled_circuits(M) if e in C]
    return min(cs) if cs else None
