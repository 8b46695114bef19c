"""Pure-numpy fallback kernels.

Mirrors the numba backend operation for operation. The merge loop uses
identical elementwise arithmetic, so dendrograms are bit-equal across
backends for the same input matrix; pairwise distances use numpy's
vectorized reduction, which can differ from the strict ascending-order
sum in the last bits.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def pairwise_euclidean(features: np.ndarray) -> np.ndarray:
    """Full symmetric Euclidean distance matrix of the feature rows."""
    x = np.ascontiguousarray(features, dtype=np.float64)
    n = x.shape[0]
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n - 1):
        diff = x[i + 1:] - x[i]
        row = np.einsum("ij,ij->i", diff, diff)
        np.sqrt(row, out=row)
        out[i, i + 1:] = row
        out[i + 1:, i] = row
    return out


def linkage_merge(dist: np.ndarray, method: int) -> np.ndarray:
    """Greedy nearest-pair agglomeration with Lance-Williams updates.

    ``method``: 0 single, 1 complete, 2 average, 3 ward. Returns an
    (n-1, 4) array of (id_a, id_b, height, size) rows; leaves are ids
    0..n-1 and merge k creates id n+k. Equal-height candidates merge the
    pair with the lexicographically smallest (min id, max id).
    """
    n = dist.shape[0]
    merges = np.zeros((max(n - 1, 0), 4), dtype=np.float64)
    if n < 2:
        return merges
    work = np.array(dist, dtype=np.float64)
    ward = method == 3
    if ward:
        np.square(work, out=work)
    np.fill_diagonal(work, np.inf)
    size = np.ones(n, dtype=np.int64)
    cid = np.arange(n, dtype=np.int64)
    active = n
    for m in range(n - 1):
        sub = work[:active, :active]
        flat = np.argmin(sub)
        vmin = sub.flat[flat]
        bi, bj = np.unravel_index(flat, sub.shape)
        if bi > bj:
            bi, bj = bj, bi
        ties = np.argwhere(sub == vmin)
        if len(ties) > 2:  # beyond the one symmetric pair: resolve by ids
            best_key = None
            for ti, tj in ties:
                if ti >= tj:
                    continue
                key = (min(cid[ti], cid[tj]), max(cid[ti], cid[tj]))
                if best_key is None or key < best_key:
                    best_key = key
                    bi, bj = int(ti), int(tj)
        id_a = min(cid[bi], cid[bj])
        id_b = max(cid[bi], cid[bj])
        si = size[bi]
        sj = size[bj]
        height = np.sqrt(max(vmin, 0.0)) if ward else vmin
        merges[m] = (id_a, id_b, height, si + sj)

        row_i = work[bi, :active]
        row_j = work[bj, :active]
        if method == 0:
            new_row = np.minimum(row_i, row_j)
        elif method == 1:
            new_row = np.maximum(row_i, row_j)
        elif method == 2:
            new_row = (si * row_i + sj * row_j) / (si + sj)
        else:
            sk = size[:active].astype(np.float64)
            new_row = ((sk + si) * row_i + (sk + sj) * row_j - sk * vmin) / (
                si + sj + sk
            )
        work[bi, :active] = new_row
        work[:active, bi] = new_row
        work[bi, bi] = np.inf
        size[bi] = si + sj
        cid[bi] = n + m

        last = active - 1
        if bj != last:
            work[bj, :active] = work[last, :active]
            work[:active, bj] = work[:active, last]
            work[bj, bj] = np.inf
            size[bj] = size[last]
            cid[bj] = cid[last]
        active -= 1
    return merges
