"""Evaluation harness: token-overlap and semantic-overlap diversity,
human-logic alignment, and a dense-retrieval baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import KbwalkError
from .kb_core import KnowledgeIndex, tokenize
from .simmath import TokenCloud


# -- token overlap ---------------------------------------------------------

def _ngrams(tokens: list[str], n: int) -> dict:
    counts: dict[tuple, int] = {}
    for i in range(len(tokens) - n + 1):
        g = tuple(tokens[i:i + n])
        counts[g] = counts.get(g, 0) + 1
    return counts


def _lcs_len(a: list[str], b: list[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def _prf(match: float, n_pred: int, n_ref: int) -> tuple[float, float, float]:
    p = match / n_pred if n_pred else 0.0
    r = match / n_ref if n_ref else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def rouge(a: str, b: str, variant) -> tuple[float, float, float]:
    """(precision, recall, f1) of `a` against reference `b`.

    variant 1/2 -> n-gram overlap with clipping; variant "L" -> LCS.
    """
    ta, tb = tokenize(a), tokenize(b)
    if variant == "L":
        return _prf(_lcs_len(ta, tb), len(ta), len(tb))
    n = int(variant)
    ga, gb = _ngrams(ta, n), _ngrams(tb, n)
    overlap = sum(min(c, gb.get(g, 0)) for g, c in ga.items())
    return _prf(overlap, max(len(ta) - n + 1, 0), max(len(tb) - n + 1, 0))


# -- semantic overlap ------------------------------------------------------

def semantic_overlap(a: str, b: str, embedder) -> tuple[float, float, float]:
    """Greedy token-level max-cosine matching (BERTScore-style)."""
    ca = TokenCloud.from_text(a, embedder).vectors
    cb = TokenCloud.from_text(b, embedder).vectors
    sims = ca @ cb.T
    p = float(np.mean(sims.max(axis=1)))
    r = float(np.mean(sims.max(axis=0)))
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


# -- pairwise diversity ----------------------------------------------------

@dataclass
class DiversityReport:
    rouge1_f1: float
    rouge2_f1: float
    rougeL_f1: float
    semantic_precision: float
    semantic_recall: float
    semantic_f1: float
    n_pairs: int


def diversity_report(sentences: list[str], embedder) -> DiversityReport:
    """Mean pairwise overlap over all unordered sentence pairs.

    Lower values mean higher diversity."""
    m = len(sentences)
    if m < 2:
        return DiversityReport(0, 0, 0, 0, 0, 0, 0)
    acc = np.zeros(6)
    n_pairs = 0
    for i in range(m):
        for j in range(i + 1, m):
            a, b = sentences[i], sentences[j]
            acc[0] += rouge(a, b, 1)[2]
            acc[1] += rouge(a, b, 2)[2]
            acc[2] += rouge(a, b, "L")[2]
            sp, sr, sf = semantic_overlap(a, b, embedder)
            acc[3] += sp
            acc[4] += sr
            acc[5] += sf
            n_pairs += 1
    acc /= n_pairs
    return DiversityReport(*acc.tolist(), n_pairs)


# -- human logic alignment -------------------------------------------------

@dataclass
class AlignmentInput:
    retrieved: list[str]
    transitions: list[str]
    events: list[str]
    theta: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise KbwalkError("theta must be in [0, 1]")


@dataclass
class AlignmentReport:
    score: float
    k_theta_size: int
    t_theta_size: int
    covered: int
    t_theta_empty: bool


def alignment_score(inp: AlignmentInput, entailer) -> AlignmentReport:
    """Fraction of above-threshold transitions covered by retrieved items
    that entail the same ground-truth event above the threshold."""
    if not inp.transitions:
        raise KbwalkError("alignment_score: transitions must be non-empty")

    def events_above(text: str) -> set[int]:
        return {i for i, e in enumerate(inp.events)
                if entailer.entail(text, e) > inp.theta}

    k_events = [events_above(k) for k in inp.retrieved]
    k_theta = [ev for ev in k_events if ev]
    t_events = [events_above(t) for t in inp.transitions]
    t_theta = [ev for ev in t_events if ev]
    if not t_theta:
        return AlignmentReport(0.0, len(k_theta), 0, 0, True)
    covered_events: set[int] = set()
    for ev in k_theta:
        covered_events |= ev
    covered = sum(1 for ev in t_theta if ev & covered_events)
    return AlignmentReport(covered / len(t_theta), len(k_theta), len(t_theta),
                           covered, False)


# -- dense-retrieval baseline ---------------------------------------------

def baseline_retrieve(query: str, index: KnowledgeIndex, embedder,
                      k: int) -> list[tuple[str, float]]:
    """Top-k sentences by cosine similarity of whole-sentence embeddings."""
    if k < 1:
        raise KbwalkError("baseline_retrieve: k must be >= 1")
    qvec = embedder.embed_one(query)
    sids = sorted(index.sentences)
    mat = np.ascontiguousarray(np.stack(
        embedder.embed([index.sentences[s].text for s in sids])))
    sims = kernels.batch_cosine(mat, qvec)
    order = sorted(range(len(sids)), key=lambda i: (-sims[i], sids[i]))
    return [(sids[i], float(sims[i])) for i in order[:k]]
