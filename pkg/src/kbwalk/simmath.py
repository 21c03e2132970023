"""Numeric primitives: cosine, relaxed word-mover distance, policy weights.

The relaxed word-mover distance is the max of the two directional
relaxations (mean over tokens of the min cosine distance to the other
cloud), a lower bound of exact optimal transport under uniform weights.
Exact OT lives only in the test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, KbwalkError
from .kb_core import tokenize


@dataclass(frozen=True)
class TokenCloud:
    """One unit vector per kept token; uniform weights are implicit."""

    vectors: np.ndarray  # (n_tokens, dim)

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[0] == 0:
            raise KbwalkError("TokenCloud requires a non-empty (n, dim) matrix")

    @classmethod
    def from_text(cls, text: str, embedder) -> "TokenCloud":
        tokens = tokenize(text) or [text]
        vecs = embedder.embed(tokens)
        return cls(np.ascontiguousarray(np.stack(vecs)))


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Dot product of two unit vectors."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"cosine: {a.shape} vs {b.shape}")
    return float(np.dot(a, b))


def wasserstein(a: TokenCloud, b: TokenCloud) -> float:
    if a.vectors.shape[1] != b.vectors.shape[1]:
        raise DimensionMismatch(
            f"wasserstein: dim {a.vectors.shape[1]} vs {b.vectors.shape[1]}")
    return float(kernels.relaxed_wmd(a.vectors, b.vectors))


def policy_weights(scores, temperature: float = 1.0) -> np.ndarray:
    """Exponential normalization with max-shift; order-preserving."""
    arr = np.asarray(scores, dtype=np.float64)
    if arr.size == 0:
        raise KbwalkError("policy_weights: empty scores")
    if not np.all(np.isfinite(arr)):
        raise KbwalkError("policy_weights: non-finite score")
    if temperature <= 0:
        raise KbwalkError("policy_weights: temperature must be > 0")
    return kernels.softmax_weights(arr, temperature)
