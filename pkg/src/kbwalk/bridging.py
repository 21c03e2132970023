"""Concept Bridging: locate the context-coherent sub-region of the corpus.

The search policy favors candidates similar to both the context and its
explicit concepts; the critic combines the concept bridging rate with a
Wasserstein-distance coherence penalty.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import SearchError
from .kb_core import KnowledgeIndex, KnowledgeSentence, extract_concepts
from .mcts import KnowledgeChain, SearchConfig, SearchState, SearchTree, TaskScorers
from .simmath import TokenCloud, cosine, wasserstein


@dataclass
class BridgeQuery:
    context: str
    context_concepts: tuple[str, ...]  # resolved, in extraction order
    lam: float = -1000.0


def make_bridge_query(context: str, index: KnowledgeIndex,
                      lam: float = -1000.0) -> BridgeQuery:
    concepts = extract_concepts(context)
    resolved = tuple(c for c in concepts if c in index.concepts)
    if not resolved:
        raise SearchError(
            f"no context concept resolvable in index: {concepts}",
            missing_concepts=concepts)
    return BridgeQuery(context, resolved, lam)


@dataclass
class SubRegion:
    sentence_ids: set[str]
    concept_ids: set[str]
    chains: list[KnowledgeChain]

    def to_jsonl(self, index: KnowledgeIndex, fh) -> None:
        via = {}
        for chain in self.chains:
            for sid, concept, _ in chain.steps:
                via.setdefault(sid, concept)
        for sid in sorted(self.sentence_ids):
            fh.write(json.dumps({
                "sentence_id": sid,
                "text": index.sentences[sid].text,
                "via_concept": via.get(sid),
            }, sort_keys=True) + "\n")


class BridgeScorers(TaskScorers):
    def __init__(self, query: BridgeQuery, index: KnowledgeIndex, embedder):
        self.query = query
        self.index = index
        self.embedder = embedder
        self.context_text = query.context
        self.query_text = query.context
        self._ctx_vec = embedder.embed_one(query.context)
        self._concept_vecs = embedder.embed(list(query.context_concepts))
        self._ctx_cloud = TokenCloud.from_text(query.context, embedder)
        self._cloud_cache: dict[str, TokenCloud] = {}

    def policy_score(self, sentence: KnowledgeSentence) -> float:
        vec = self.embedder.embed_one(sentence.text)
        ctx_term = cosine(vec, self._ctx_vec)
        concept_term = float(np.mean([cosine(vec, cv) for cv in self._concept_vecs]))
        return ctx_term + concept_term

    def _cloud(self, sid: str) -> TokenCloud:
        cloud = self._cloud_cache.get(sid)
        if cloud is None:
            cloud = TokenCloud.from_text(self.index.sentences[sid].text, self.embedder)
            self._cloud_cache[sid] = cloud
        return cloud

    def critic(self, state: SearchState) -> float:
        if state.sentence_id is None or state.marked_concept is None:
            return 0.0
        group = self.index.group_members(state.marked_concept)
        n_c = self.query.context_concepts
        rate = len(set(n_c) & group) / len(n_c)
        wd = wasserstein(self._cloud(state.sentence_id), self._ctx_cloud)
        return rate + self.query.lam * wd


def build_subregion(query: BridgeQuery, index: KnowledgeIndex, embedder,
                    config: SearchConfig, trace=None) -> SubRegion:
    """Run the bridging search; the sub-region is the union of chain
    sentences plus every sentence of each visited marked concept's group."""
    scorers = BridgeScorers(query, index, embedder)
    tree = SearchTree(index, embedder, scorers, config,
                      seed_concepts=list(query.context_concepts), trace=trace)
    chains = tree.run()
    sentence_ids: set[str] = set()
    concept_ids: set[str] = set(query.context_concepts)
    for chain in chains:
        for sid, concept, _ in chain.steps:
            sentence_ids.add(sid)
            if concept is not None:
                concept_ids.add(concept)
                sentence_ids |= index.group_sentence_ids(concept)
    return SubRegion(sentence_ids, concept_ids, chains)
