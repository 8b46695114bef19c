"""Numba-jitted hot kernels.

Pairwise distances accumulate each entry in ascending component order
(a fixed serial reduction, so results are reproducible across runs and
platforms); the pair loop is cache-blocked, which changes only the order
entries are produced in, not any entry's value. The merge loop is the
naive greedy scan — quadratic per merge — which is fast enough at a few
thousand frames and keeps tie-breaking trivially exact.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"

_BLOCK = 32


@njit(cache=True)
def _pairwise_blocked(x: np.ndarray, block: int) -> np.ndarray:
    n, d = x.shape
    out = np.zeros((n, n), dtype=np.float64)
    for ib in range(0, n, block):
        ie = min(ib + block, n)
        for jb in range(ib, n, block):
            je = min(jb + block, n)
            for i in range(ib, ie):
                j0 = jb if jb > i else i + 1
                for j in range(j0, je):
                    acc = 0.0
                    for k in range(d):
                        t = x[i, k] - x[j, k]
                        acc += t * t
                    v = np.sqrt(acc)
                    out[i, j] = v
                    out[j, i] = v
    return out


def pairwise_euclidean(features: np.ndarray) -> np.ndarray:
    """Full symmetric Euclidean distance matrix of the feature rows."""
    x = np.ascontiguousarray(features, dtype=np.float64)
    return _pairwise_blocked(x, _BLOCK)


@njit(cache=True)
def _linkage_merge(dist: np.ndarray, method: int) -> np.ndarray:
    n = dist.shape[0]
    merges = np.zeros((max(n - 1, 0), 4), dtype=np.float64)
    if n < 2:
        return merges
    work = dist.copy()
    ward = method == 3
    if ward:
        for i in range(n):
            for j in range(n):
                work[i, j] = work[i, j] * work[i, j]
    size = np.ones(n, dtype=np.int64)
    cid = np.arange(n, dtype=np.int64)
    active = n
    for m in range(n - 1):
        best = np.inf
        bi = -1
        bj = -1
        for i in range(active):
            for j in range(i + 1, active):
                v = work[i, j]
                if v < best:
                    best = v
                    bi = i
                    bj = j
                elif v == best and bi >= 0:
                    a0 = min(cid[i], cid[j])
                    a1 = max(cid[i], cid[j])
                    b0 = min(cid[bi], cid[bj])
                    b1 = max(cid[bi], cid[bj])
                    if a0 < b0 or (a0 == b0 and a1 < b1):
                        bi = i
                        bj = j
        id_a = min(cid[bi], cid[bj])
        id_b = max(cid[bi], cid[bj])
        si = size[bi]
        sj = size[bj]
        if ward:
            height = np.sqrt(max(best, 0.0))
        else:
            height = best
        merges[m, 0] = id_a
        merges[m, 1] = id_b
        merges[m, 2] = height
        merges[m, 3] = si + sj

        for k in range(active):
            if k == bi or k == bj:
                continue
            a = work[bi, k]
            b = work[bj, k]
            if method == 0:
                v = min(a, b)
            elif method == 1:
                v = max(a, b)
            elif method == 2:
                v = (si * a + sj * b) / (si + sj)
            else:
                sk = float(size[k])
                v = ((sk + si) * a + (sk + sj) * b - sk * best) / (si + sj + sk)
            work[bi, k] = v
            work[k, bi] = v
        size[bi] = si + sj
        cid[bi] = n + m

        last = active - 1
        if bj != last:
            for k in range(active):
                work[bj, k] = work[last, k]
                work[k, bj] = work[k, last]
            size[bj] = size[last]
            cid[bj] = cid[last]
        active -= 1
    return merges


def linkage_merge(dist: np.ndarray, method: int) -> np.ndarray:
    """Greedy nearest-pair agglomeration with Lance-Williams updates.

    Same contract as the numpy backend: (n-1, 4) rows of
    (id_a, id_b, height, size), merge k creating id n+k, ties resolved
    to the lexicographically smallest (min id, max id).
    """
    work = np.ascontiguousarray(dist, dtype=np.float64)
    return _linkage_merge(work, method)
