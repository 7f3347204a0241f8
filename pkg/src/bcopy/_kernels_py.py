"""Pure-numpy fallback for the compiled scan kernels.

Must stay result-identical to ``bcopy._kernels``: same indices on ties
(first minimum) and the same distances, since callers feed both backends
the same precomputed float arrays.
"""

import numpy as np
from scipy.spatial.distance import cdist


def masked_argmin(values, labels, ref_label):
    admissible = labels != ref_label
    if not admissible.any():
        return -1, float("inf")
    masked = np.where(admissible, values, np.inf)
    i = int(np.argmin(masked))
    return i, float(masked[i])


def masked_argmin_pairs(dist2, row_labels, col_labels):
    mask = col_labels[None, :] != row_labels[:, None]
    masked = np.where(mask, dist2, np.inf)
    idx = np.argmin(masked, axis=1)
    best = masked[np.arange(masked.shape[0]), idx]
    idx = np.where(np.isinf(best), -1, idx)
    return idx.astype(np.int64), best


def nearest_index(queries, train, chunk=4096):
    out = np.empty(queries.shape[0], dtype=np.int64)
    for start in range(0, queries.shape[0], chunk):
        block = queries[start:start + chunk]
        d2 = cdist(block, train, "sqeuclidean")
        out[start:start + chunk] = np.argmin(d2, axis=1)
    return out
