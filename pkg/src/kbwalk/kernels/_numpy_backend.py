"""Pure-numpy reference implementations of the hot numeric kernels.

Always importable; selected explicitly via KBWALK_NO_NUMBA=1 or used as
fallback when numba is unavailable.
"""

import numpy as np

BACKEND = "numpy"


def relaxed_wmd(a, b):
    """Relaxed word-mover distance between two unit-row token matrices.

    max of the two directional relaxations; each direction is the mean over
    tokens of the min cosine distance (1 - cos) to the other cloud.  Lower
    bound of exact optimal transport under uniform weights.
    """
    sims = a @ b.T
    d_ab = float(np.mean(1.0 - sims.max(axis=1)))
    d_ba = float(np.mean(1.0 - sims.max(axis=0)))
    return max(d_ab, d_ba, 0.0)


def batch_cosine(matrix, vec):
    """Cosine of every unit row of `matrix` against unit vector `vec`."""
    return np.asarray(matrix @ vec, dtype=np.float64)


def softmax_weights(scores, temperature):
    """Max-shifted exponential normalization of a score vector."""
    z = (scores - scores.max()) / temperature
    e = np.exp(z)
    return e / e.sum()
