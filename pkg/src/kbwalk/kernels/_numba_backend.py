"""Numba-jitted versions of the hot kernels.

Kept semantically identical to `_numpy_backend`; fastmath stays off so the
two paths agree to float64 rounding.
"""

import numpy as np
from numba import njit

BACKEND = "numba"

_JIT = {"nogil": True, "cache": True, "fastmath": False}


@njit(**_JIT)
def relaxed_wmd(a, b):
    n = a.shape[0]
    m = b.shape[0]
    sims = np.dot(a, b.T)  # BLAS under numba
    acc_ab = 0.0
    for i in range(n):
        best = sims[i, 0]
        for j in range(1, m):
            if sims[i, j] > best:
                best = sims[i, j]
        acc_ab += 1.0 - best
    acc_ba = 0.0
    for j in range(m):
        best = sims[0, j]
        for i in range(1, n):
            if sims[i, j] > best:
                best = sims[i, j]
        acc_ba += 1.0 - best
    out = acc_ab / n
    alt = acc_ba / m
    if alt > out:
        out = alt
    if out < 0.0:
        out = 0.0
    return out


@njit(**_JIT)
def batch_cosine(matrix, vec):
    return np.dot(matrix, vec)


@njit(**_JIT)
def softmax_weights(scores, temperature):
    n = scores.shape[0]
    mx = scores[0]
    for i in range(1, n):
        if scores[i] > mx:
            mx = scores[i]
    e = np.empty(n, dtype=np.float64)
    total = 0.0
    for i in range(n):
        e[i] = np.exp((scores[i] - mx) / temperature)
        total += e[i]
    for i in range(n):
        e[i] /= total
    return e
