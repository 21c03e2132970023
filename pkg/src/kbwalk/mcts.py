"""Rollout-free Monte Carlo tree search over the knowledge graph.

Selection uses PUCT, expansion prunes candidates with the task policy,
leaves are evaluated by a task critic (no rollout), and values are
back-propagated to the root.  The engine is generic: Concept Bridging and
Reasoning-Aware Retrieval plug in their own scorers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import SearchError
from .kb_core import KnowledgeIndex, KnowledgeSentence
from .simmath import policy_weights


@dataclass(frozen=True)
class SearchState:
    context: str
    sentence_id: str | None
    marked_concept: str | None
    depth: int


@dataclass
class SearchConfig:
    horizon: int = 3
    candidate_pool: int = 50
    branch: int = 5
    c_puct: float = 1.0 / math.sqrt(2.0)
    simulations: int = 100
    seed: int = 0
    temperature: float = 1.0

    def __post_init__(self):
        if self.horizon < 1 or self.simulations < 1:
            raise SearchError("horizon and simulations must be >= 1")
        if self.branch > self.candidate_pool:
            raise SearchError("branch must be <= candidate_pool")


class SearchNode:
    __slots__ = ("state", "parent", "children", "prior", "visits",
                 "value_sum", "critic_value", "eval_count", "expanded",
                 "terminal")

    def __init__(self, state: SearchState, parent=None, prior: float = 1.0):
        self.state = state
        self.parent = parent
        self.children: list[SearchNode] = []
        self.prior = prior
        self.visits = 0
        self.value_sum = 0.0
        self.critic_value: float | None = None
        self.eval_count = 0
        self.expanded = False
        self.terminal = False

    @property
    def q(self) -> float:
        return self.value_sum / self.visits if self.visits > 0 else 0.0

    @property
    def action(self) -> str | None:
        return self.state.sentence_id


@dataclass(frozen=True)
class KnowledgeChain:
    steps: tuple[tuple[str, str, float], ...]  # (sentence_id, marked_concept, critic)
    total_value: float


class TaskScorers:
    """Interface the two search phases implement.

    context_text      -- conversation context (drives concept marking)
    query_text       -- text whose embedding prunes the candidate pool
    policy_score(s)  -- prior-driving score for a candidate sentence
    critic(state)    -- leaf evaluation
    """

    context_text: str
    query_text: str

    def policy_score(self, sentence: KnowledgeSentence) -> float:
        raise NotImplementedError

    def critic(self, state: SearchState) -> float:
        raise NotImplementedError


def puct_score(child: SearchNode, parent_visits: int, c_puct: float) -> float:
    """Q + c_puct * P * sqrt(N_parent) / (1 + N_child), Q=0 when unvisited."""
    return child.q + c_puct * child.prior * math.sqrt(parent_visits) / (1 + child.visits)


class SearchTree:
    def __init__(self, index: KnowledgeIndex, embedder, scorers: TaskScorers,
                 config: SearchConfig, seed_concepts: list[str],
                 allowed_ids: set[str] | None = None, trace=None):
        self.index = index
        self.embedder = embedder
        self.scorers = scorers
        self.config = config
        self.allowed_ids = allowed_ids
        self.trace = trace
        self.context_vec = embedder.embed_one(scorers.context_text)
        self.query_vec = embedder.embed_one(scorers.query_text)

        resolved = [c for c in seed_concepts if c in index.concepts]
        missing = [c for c in seed_concepts if c not in index.concepts]
        if not resolved:
            raise SearchError(
                f"no seed concept resolvable in index: {missing}",
                missing_concepts=missing)
        self.seed_concepts = resolved
        self.root = SearchNode(SearchState(scorers.context_text, None, None, 0))

    # -- expansion ---------------------------------------------------------

    def _path_sentence_ids(self, node: SearchNode) -> set[str]:
        out = set()
        while node is not None:
            if node.state.sentence_id is not None:
                out.add(node.state.sentence_id)
            node = node.parent
        return out

    def _candidate_ids(self, node: SearchNode) -> list[str]:
        if node.state.marked_concept is None:
            ids: set[str] = set()
            for c in self.seed_concepts:
                ids |= self.index.group_sentence_ids(c)
        else:
            ids = self.index.group_sentence_ids(node.state.marked_concept)
        if self.allowed_ids is not None:
            ids &= self.allowed_ids
        ids -= self._path_sentence_ids(node)
        return sorted(ids)

    def _mark_concept(self, sentence: KnowledgeSentence) -> str:
        """The concept in the sentence most similar to the context
        (tie-break lexicographic)."""
        surfaces = sorted(set(sentence.concepts))
        vecs = self.embedder.embed(surfaces)
        sims = kernels.batch_cosine(np.ascontiguousarray(np.stack(vecs)),
                                    self.context_vec)
        return surfaces[int(np.argmax(sims))]

    def expand(self, node: SearchNode) -> None:
        cand_ids = self._candidate_ids(node)
        if not cand_ids:
            node.terminal = True
            node.expanded = True
            return
        # prune to candidate_pool by similarity to the policy query
        if len(cand_ids) > self.config.candidate_pool:
            mat = np.ascontiguousarray(np.stack(
                self.embedder.embed([self.index.sentences[s].text for s in cand_ids])))
            sims = kernels.batch_cosine(mat, self.query_vec)
            order = sorted(range(len(cand_ids)), key=lambda i: (-sims[i], cand_ids[i]))
            cand_ids = [cand_ids[i] for i in order[: self.config.candidate_pool]]
        scored = sorted(
            ((self.scorers.policy_score(self.index.sentences[s]), s) for s in cand_ids),
            key=lambda t: (-t[0], t[1]))
        top = scored[: self.config.branch]
        priors = policy_weights([s for s, _ in top], self.config.temperature)
        for (score, sid), prior in zip(top, priors):
            sent = self.index.sentences[sid]
            child_state = SearchState(node.state.context, sid,
                                      self._mark_concept(sent), node.state.depth + 1)
            node.children.append(SearchNode(child_state, node, float(prior)))
        node.expanded = True

    # -- simulation --------------------------------------------------------

    def _select_child(self, node: SearchNode) -> SearchNode:
        # argmax PUCT, tie-break lowest action id
        best, best_score = None, None
        for child in node.children:
            score = puct_score(child, node.visits, self.config.c_puct)
            if best is None or score > best_score or \
                    (score == best_score and child.action < best.action):
                best, best_score = child, score
        return best

    def backpropagate(self, leaf: SearchNode, value: float) -> None:
        node = leaf
        while node is not None:
            node.visits += 1
            node.value_sum += value
            node = node.parent

    def run(self) -> list[KnowledgeChain]:
        self.expand(self.root)
        if not self.root.children:
            raise SearchError("root expansion produced no candidates")
        for it in range(self.config.simulations):
            node = self.root
            while node.expanded and node.children:
                node = self._select_child(node)
            if not node.expanded and not node.terminal and \
                    node.state.depth < self.config.horizon:
                self.expand(node)
            if node.critic_value is None:
                node.critic_value = float(self.scorers.critic(node.state))
            node.eval_count += 1
            self.backpropagate(node, node.critic_value)
            if self.trace is not None:
                path = []
                walk = node
                while walk is not None and walk.action is not None:
                    path.append(walk.action)
                    walk = walk.parent
                self.trace.write(json.dumps({
                    "iter": it, "path": path[::-1], "value": node.critic_value,
                    "chosen_action": node.action}, sort_keys=True) + "\n")
        return self._chains()

    # -- result extraction -------------------------------------------------

    def _descend(self, node: SearchNode) -> list[SearchNode]:
        # most-visited child recursively; ties by higher Q, then lowest id
        path = [node]
        while True:
            visited = [c for c in node.children if c.visits > 0]
            if not visited:
                return path
            node = sorted(visited, key=lambda c: (-c.visits, -c.q, c.action))[0]
            path.append(node)

    def _chains(self) -> list[KnowledgeChain]:
        ranked_roots = sorted(
            (c for c in self.root.children if c.visits > 0),
            key=lambda c: (-c.visits, -c.q, c.action))
        chains = []
        for top in ranked_roots[: self.config.branch]:
            nodes = self._descend(top)
            steps = tuple((n.state.sentence_id, n.state.marked_concept,
                           n.critic_value if n.critic_value is not None else 0.0)
                          for n in nodes)
            chains.append(KnowledgeChain(steps, sum(s[2] for s in steps)))
        return chains


def audit_visits(node: SearchNode) -> bool:
    """Visit conservation: N = sum over children N + own evaluation count."""
    total = sum(c.visits for c in node.children)
    if node.visits != total + node.eval_count:
        return False
    return all(audit_visits(c) for c in node.children)
