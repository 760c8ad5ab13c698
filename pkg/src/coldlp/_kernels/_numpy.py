"""Vectorized NumPy fallbacks for the compiled CSR kernels.

Same contracts as ``_ckern``: float64 C-contiguous matrices, int64 CSR
arrays, sorted neighbor lists. Segment sums use ``np.add.reduceat``, whose
accumulation order may differ from the sequential compiled loops in the
last ulp; callers must not rely on bitwise agreement across backends.
"""

import numpy as np


def _segment_sum(rows: np.ndarray, indptr: np.ndarray, num_segments: int) -> np.ndarray:
    # reduceat gives the wrong answer for empty segments (it returns the
    # element at the start offset), so restrict it to non-empty rows.
    out = np.zeros((num_segments, rows.shape[1]), dtype=np.float64)
    nonempty = indptr[:-1] < indptr[1:]
    if rows.shape[0]:
        out[nonempty] = np.add.reduceat(rows, indptr[:-1][nonempty], axis=0)
    return out


def neighbor_sum(h: np.ndarray, indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """out[v] = sum of h rows over the CSR row of v (zero row if empty)."""
    return _segment_sum(h[indices], indptr, indptr.shape[0] - 1)


def neighbor_weighted_sum(
    h: np.ndarray, indptr: np.ndarray, indices: np.ndarray, weights: np.ndarray
) -> np.ndarray:
    """out[v] = sum_j weights[j] * h[indices[j]] over the CSR row of v."""
    return _segment_sum(h[indices] * weights[:, None], indptr, indptr.shape[0] - 1)


def intersection_weight_sum(
    indptr: np.ndarray,
    indices: np.ndarray,
    node_weight: np.ndarray,
    us: np.ndarray,
    vs: np.ndarray,
) -> np.ndarray:
    """For each pair (us[i], vs[i]): sum node_weight over N(u) ∩ N(v)."""
    out = np.zeros(us.shape[0], dtype=np.float64)
    for i in range(us.shape[0]):
        nu = indices[indptr[us[i]] : indptr[us[i] + 1]]
        nv = indices[indptr[vs[i]] : indptr[vs[i] + 1]]
        common = np.intersect1d(nu, nv, assume_unique=True)
        if common.size:
            out[i] = node_weight[common].sum()
    return out
