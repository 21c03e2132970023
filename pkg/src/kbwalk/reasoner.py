"""Inference generation, confidence scoring, and diverse subset selection.

Confidence is the arithmetic mean of per-token probabilities.  Subset
selection is greedy MAP over a quality/diversity kernel, Cholesky-style
incremental (conditional-variance updates as in fast greedy MAP)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import KbwalkError
from .providers import RELATIONS, InferenceCandidate
from .simmath import cosine


@dataclass(frozen=True)
class Inference:
    candidate: InferenceCandidate
    confidence: float
    embedding: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class DppKernel:
    matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def score_confidence(candidate: InferenceCandidate) -> float:
    if not candidate.token_probs:
        raise KbwalkError("score_confidence: empty token_probs")
    return float(np.mean(candidate.token_probs))


def build_kernel(inferences: list[Inference]) -> DppKernel:
    """Quality/diversity kernel L = D S D with D = diag(sqrt(confidence)).

    Diagonal entries equal the confidences (relevance); off-diagonal
    entries are confidence-modulated similarities with negative cosines
    clamped to 0, so duplicate inferences yield a singular sub-kernel.
    Repaired toward PSD by shifting the diagonal when the smallest
    eigenvalue dips below -1e-6."""
    n = len(inferences)
    if n < 1:
        raise KbwalkError("build_kernel: need at least one inference")
    q = np.sqrt([inf.confidence for inf in inferences])
    L = np.empty((n, n))
    for i in range(n):
        L[i, i] = q[i] * q[i]
        for j in range(i + 1, n):
            sim = max(cosine(inferences[i].embedding, inferences[j].embedding), 0.0)
            L[i, j] = L[j, i] = q[i] * sim * q[j]
    min_eig = float(np.linalg.eigvalsh(L)[0])
    if min_eig < -1e-6:
        L += (1e-6 - min_eig) * np.eye(n)
    return DppKernel(L)


def select_diverse(kernel: DppKernel, k: int, tol: float = 1e-12) -> list[int]:
    """Greedy MAP subset of size <= k.

    Repeatedly adds the item with the largest determinant marginal gain
    (conditional variance d_i^2); stops at k items or when the best gain is
    no longer positive.  Ties break to the lowest index via argmax."""
    if k < 1:
        raise KbwalkError("select_diverse: k must be >= 1")
    L = kernel.matrix
    n = L.shape[0]
    cis = np.zeros((min(k, n), n))
    di2s = np.array(np.diag(L), dtype=np.float64)
    selected: list[int] = []
    while len(selected) < min(k, n):
        best = int(np.argmax(di2s))
        if di2s[best] <= tol:
            break
        m = len(selected)
        di = np.sqrt(di2s[best])
        eis = (L[best, :] - cis[:m, best] @ cis[:m, :]) / di
        cis[m, :] = eis
        di2s -= np.square(eis)
        di2s[best] = -np.inf
        selected.append(best)
    return selected


def generate_inferences(context: str, inferencer, embedder,
                        relations=RELATIONS, n_per_relation: int = 3,
                        k_select: int = 5) -> list[Inference]:
    """Candidates across all relations, DPP-pruned to a diverse subset."""
    pool: list[Inference] = []
    seen_texts = set()
    for relation in relations:
        for cand in inferencer.infer(context, relation, n_per_relation):
            if cand.text in seen_texts:
                continue
            seen_texts.add(cand.text)
            pool.append(Inference(cand, score_confidence(cand),
                                  embedder.embed_one(cand.text)))
    if not pool:
        return []
    kernel = build_kernel(pool)
    picked = select_diverse(kernel, k_select)
    return [pool[i] for i in picked]
