"""Corpus ingestion and the concept-linked knowledge index.

Sentences are linked through the concepts they mention; concepts are
clustered into node groups by greedy online clustering over their
embeddings.  The built index is immutable by convention and safe to share
across concurrent readers.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import IngestError, LookupError_, ProviderError

log = logging.getLogger(__name__)

SNAPSHOT_MAGIC = "KBWALK-IDX v1"

# Compact English stopword list; deliberately small and frozen so concept
# extraction stays deterministic across environments.
STOPWORDS = frozenset("""
a about above after again all also am an and any are as at be because been
before being below between both but by can could did do does doing down
during each few for from further had has have having he her here hers him
his how i if in into is it its itself just me more most my no nor not now
of off on once only or other our ours out over own same she should so some
such than that the their theirs them then there these they this those
through to too under until up very was we were what when where which while
who whom why will with would you your yours
""".split())

_TOKEN_RE = re.compile(r"[a-z0-9']+")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens, punctuation stripped, order kept."""
    return _TOKEN_RE.findall(text.lower())


def extract_concepts(text: str) -> list[str]:
    """Concept surfaces for a sentence: tokens minus stopwords and
    single-character tokens, case-folded, deduplicated, order preserved."""
    seen = set()
    out = []
    for tok in tokenize(text):
        if len(tok) < 2 or tok in STOPWORDS or tok in seen:
            continue
        seen.add(tok)
        out.append(tok)
    return out


@dataclass(slots=True)
class KnowledgeSentence:
    id: str
    text: str
    source_term: str
    score: float
    concepts: tuple[str, ...]
    token_count: int


@dataclass(slots=True)
class ConceptNode:
    id: str
    surface: str
    sentence_ids: set[str]
    group_id: str | None = None


@dataclass(slots=True)
class NodeGroup:
    id: str
    member_concepts: set[str]
    sentence_ids: set[str]


@dataclass(slots=True)
class IngestConfig:
    max_rows: int | None = None


@dataclass
class IngestStats:
    accepted: int = 0
    skipped: int = 0
    deduplicated: int = 0


@dataclass
class KnowledgeIndex:
    sentences: dict[str, KnowledgeSentence] = field(default_factory=dict)
    concepts: dict[str, ConceptNode] = field(default_factory=dict)
    groups: dict[str, NodeGroup] = field(default_factory=dict)
    surface_lookup: dict[str, str] = field(default_factory=dict)
    stats: IngestStats = field(default_factory=IngestStats)

    def group_sentence_ids(self, concept_id: str) -> set[str]:
        """All sentence ids connected to any concept in the concept's group."""
        node = self.concepts.get(concept_id)
        if node is None:
            raise LookupError_(f"unknown concept: {concept_id!r}")
        if node.group_id is None:
            return set(node.sentence_ids)
        return set(self.groups[node.group_id].sentence_ids)

    def group_members(self, concept_id: str) -> set[str]:
        node = self.concepts.get(concept_id)
        if node is None:
            raise LookupError_(f"unknown concept: {concept_id!r}")
        if node.group_id is None:
            return {concept_id}
        return set(self.groups[node.group_id].member_concepts)


def group_sentences(index: KnowledgeIndex, concept_id: str) -> list[KnowledgeSentence]:
    """Sentences of the concept's whole node group, sorted by id."""
    ids = index.group_sentence_ids(concept_id)
    return [index.sentences[s] for s in sorted(ids)]


def _looks_like_header(fields: list[str]) -> bool:
    try:
        float(fields[2])
        return False
    except ValueError:
        return True


def ingest_corpus(path, limits: IngestConfig | None = None) -> KnowledgeIndex:
    """Read a `TERM<TAB>SENTENCE<TAB>SCORE` TSV into a KnowledgeIndex.

    Duplicate (term, sentence) rows keep the higher score.  Malformed rows
    are skipped with a warning count; zero accepted rows is a hard error.
    Node groups are not built here (see build_node_groups).
    """
    limits = limits or IngestConfig()
    # (term, text) -> [term, text, score]; insertion order gives stable ids
    rows: dict[tuple[str, str], float] = {}
    skipped = 0
    n_read = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                skipped += 1
                continue
            if lineno == 0 and _looks_like_header(fields):
                continue
            term = fields[0].strip().lower()
            text = fields[1].strip()
            try:
                score = float(fields[2])
            except ValueError:
                skipped += 1
                continue
            if not term or not text:
                skipped += 1
                continue
            score = min(max(score, 0.0), 1.0)
            key = (term, text)
            prev = rows.get(key)
            if prev is None:
                rows[key] = score
            elif score > prev:
                rows[key] = score
            n_read += 1
            if limits.max_rows is not None and n_read >= limits.max_rows:
                break
    if skipped:
        log.warning("ingest: skipped %d malformed rows", skipped)
    if not rows:
        raise IngestError(f"empty corpus: no accepted rows in {path}")

    index = KnowledgeIndex()
    index.stats = IngestStats(accepted=len(rows), skipped=skipped,
                              deduplicated=n_read - len(rows))
    concepts = index.concepts
    for i, ((term, text), score) in enumerate(rows.items()):
        sid = f"s{i:08d}"
        clist = [term] if len(term) > 0 else []
        for c in extract_concepts(text):
            if c != term:
                clist.append(c)
        if not clist:
            clist = [term]
        tokens = tokenize(text)
        sent = KnowledgeSentence(
            id=sid, text=text, source_term=term, score=score,
            concepts=tuple(clist), token_count=max(1, len(tokens)),
        )
        index.sentences[sid] = sent
        for c in clist:
            node = concepts.get(c)
            if node is None:
                node = ConceptNode(id=c, surface=c, sentence_ids=set())
                concepts[c] = node
                index.surface_lookup[c] = c
            node.sentence_ids.add(sid)
    return index


def build_node_groups(index: KnowledgeIndex, embedder, threshold: float = 0.6) -> KnowledgeIndex:
    """Cluster concepts into node groups by greedy online clustering.

    Concepts are processed in sorted id order; each joins the first group
    whose centroid cosine >= threshold, else founds a new group.  Centroids
    are running means re-normalized to unit length.  Mutates and returns
    the index.
    """
    concept_ids = sorted(index.concepts)
    if not concept_ids:
        return index
    try:
        vectors = embedder.embed([index.concepts[c].surface for c in concept_ids])
    except Exception as exc:
        raise ProviderError(f"node-group build aborted: {exc}") from exc

    dim = len(vectors[0])
    cap = 64
    sums = np.zeros((cap, dim))       # per-group running vector sum
    centroids = np.zeros((cap, dim))  # unit-normalized centroid cache
    n_groups = 0
    members: list[list[str]] = []
    for cid, vec in zip(concept_ids, vectors):
        hits = np.nonzero(centroids[:n_groups] @ vec >= threshold)[0]
        if hits.size:
            g = int(hits[0])  # first matching group, in founding order
            sums[g] += vec
            norm = np.linalg.norm(sums[g])
            centroids[g] = sums[g] / norm if norm > 0 else sums[g]
            members[g].append(cid)
        else:
            if n_groups == cap:
                cap *= 2
                sums = np.resize(sums, (cap, dim))
                centroids = np.resize(centroids, (cap, dim))
                sums[n_groups:] = 0.0
                centroids[n_groups:] = 0.0
            sums[n_groups] = vec
            centroids[n_groups] = vec
            members.append([cid])
            n_groups += 1

    index.groups.clear()
    for g, mem in enumerate(members):
        gid = f"g{g:06d}"
        sids: set[str] = set()
        for cid in mem:
            index.concepts[cid].group_id = gid
            sids |= index.concepts[cid].sentence_ids
        index.groups[gid] = NodeGroup(id=gid, member_concepts=set(mem), sentence_ids=sids)
    return index


def save_index(index: KnowledgeIndex, path) -> None:
    """Write a line-delimited text snapshot with the versioned magic header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SNAPSHOT_MAGIC + "\n")
        dump = lambda obj: fh.write(json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n")
        dump({"kind": "meta", "sentences": len(index.sentences),
              "concepts": len(index.concepts), "groups": len(index.groups)})
        for sid in sorted(index.sentences):
            s = index.sentences[sid]
            dump({"kind": "sentence", "id": s.id, "term": s.source_term,
                  "text": s.text, "score": s.score, "concepts": list(s.concepts),
                  "tokens": s.token_count})
        for cid in sorted(index.concepts):
            c = index.concepts[cid]
            dump({"kind": "concept", "id": c.id, "group": c.group_id,
                  "sentences": sorted(c.sentence_ids)})
        for gid in sorted(index.groups):
            g = index.groups[gid]
            dump({"kind": "group", "id": gid, "concepts": sorted(g.member_concepts)})


def load_index(path) -> KnowledgeIndex:
    index = KnowledgeIndex()
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != SNAPSHOT_MAGIC:
            raise IngestError(f"bad snapshot header: {header!r}")
        for line in fh:
            rec = json.loads(line)
            kind = rec["kind"]
            if kind == "sentence":
                index.sentences[rec["id"]] = KnowledgeSentence(
                    id=rec["id"], text=rec["text"], source_term=rec["term"],
                    score=rec["score"], concepts=tuple(rec["concepts"]),
                    token_count=rec["tokens"])
            elif kind == "concept":
                index.concepts[rec["id"]] = ConceptNode(
                    id=rec["id"], surface=rec["id"],
                    sentence_ids=set(rec["sentences"]), group_id=rec["group"])
                index.surface_lookup[rec["id"]] = rec["id"]
            elif kind == "group":
                index.groups[rec["id"]] = NodeGroup(
                    id=rec["id"], member_concepts=set(rec["concepts"]),
                    sentence_ids=set())
    for g in index.groups.values():
        for cid in g.member_concepts:
            g.sentence_ids |= index.concepts[cid].sentence_ids
    index.stats = IngestStats(accepted=len(index.sentences))
    return index
