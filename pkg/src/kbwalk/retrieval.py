"""Reasoning-Aware Knowledge Retrieval within a bridged sub-region.

The policy targets the concatenated (inference + context) query; the
critic rewards similarity to both, adds a capped length bonus, and
penalizes repetition against previously retrieved sentences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SearchError
from .bridging import SubRegion
from .kb_core import KnowledgeIndex, KnowledgeSentence, extract_concepts
from .mcts import KnowledgeChain, SearchConfig, SearchState, SearchTree, TaskScorers
from .reasoner import Inference
from .simmath import cosine


@dataclass
class RetrievalQuery:
    context: str
    inference: Inference
    history: list[np.ndarray] = field(default_factory=list)
    length_weight: float = 0.1
    max_tokens: int = 32


@dataclass
class RetrievalResult:
    inference: Inference
    chains: list[KnowledgeChain]
    flat_knowledge: list[tuple[str, float]]  # (sentence_id, critic score), ranked


class RetrieveScorers(TaskScorers):
    def __init__(self, query: RetrievalQuery, index: KnowledgeIndex, embedder):
        self.query = query
        self.index = index
        self.embedder = embedder
        self.context_text = query.context
        self.query_text = query.inference.candidate.text + " " + query.context
        self._query_vec = embedder.embed_one(self.query_text)
        self._ctx_vec = embedder.embed_one(query.context)
        self._inf_vec = query.inference.embedding

    def policy_score(self, sentence: KnowledgeSentence) -> float:
        return cosine(self.embedder.embed_one(sentence.text), self._query_vec)

    def critic_for_sentence(self, sentence: KnowledgeSentence) -> float:
        vec = self.embedder.embed_one(sentence.text)
        length = min(sentence.token_count / self.query.max_tokens, 1.0)
        repeat = max((cosine(vec, h) for h in self.query.history), default=0.0)
        return (cosine(self._inf_vec, vec) + cosine(self._ctx_vec, vec)
                + self.query.length_weight * length - repeat)

    def critic(self, state: SearchState) -> float:
        if state.sentence_id is None:
            return 0.0
        return self.critic_for_sentence(self.index.sentences[state.sentence_id])


def retrieve_for_inference(query: RetrievalQuery, subregion: SubRegion,
                           index: KnowledgeIndex, embedder,
                           config: SearchConfig, trace=None) -> RetrievalResult:
    """Search restricted to the sub-region; accepted chains append their
    sentences to the shared history so later chains favor novelty."""
    if not subregion.sentence_ids:
        raise SearchError("empty sub-region")
    scorers = RetrieveScorers(query, index, embedder)
    seeds = [c for c in extract_concepts(query.context) if c in index.concepts]
    if not seeds:
        seeds = sorted(subregion.concept_ids & index.concepts.keys())
    tree = SearchTree(index, embedder, scorers, config, seed_concepts=seeds,
                      allowed_ids=set(subregion.sentence_ids), trace=trace)
    raw_chains = tree.run()

    # Re-score chains in acceptance order against the growing history.
    chains: list[KnowledgeChain] = []
    flat: dict[str, float] = {}
    for chain in raw_chains:
        steps = []
        for sid, concept, _ in chain.steps:
            score = scorers.critic_for_sentence(index.sentences[sid])
            steps.append((sid, concept, score))
            if sid not in flat:
                flat[sid] = score
        chains.append(KnowledgeChain(tuple(steps), sum(s[2] for s in steps)))
        for sid, _, _ in steps:
            query.history.append(embedder.embed_one(index.sentences[sid].text))
    ranked = sorted(flat.items(), key=lambda kv: (-kv[1], kv[0]))
    return RetrievalResult(query.inference, chains, ranked)
