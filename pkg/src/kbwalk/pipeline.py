"""End-to-end orchestration: reason -> bridge -> retrieve, plus config and
conversation I/O.  Bridging constrains the search space once per
conversation; retrieval optimizes within it per selected inference."""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .bridging import build_subregion, make_bridge_query
from .errors import KbwalkError, PipelineStageError, SearchError
from .kb_core import KnowledgeIndex
from .mcts import SearchConfig
from .providers import (RELATION_BY_NAME, RELATIONS, FileEmbedder,
                        RemoteEmbedder, RemoteEntailer, RemoteInferencer,
                        StubEmbedder, StubEntailer, StubInferencer)
from .reasoner import generate_inferences
from .retrieval import RetrievalQuery, RetrievalResult, retrieve_for_inference

log = logging.getLogger(__name__)


@dataclass
class ReasonerConfig:
    k_select: int = 5
    n_per_relation: int = 3
    relations: list[str] = field(default_factory=lambda: [r.name for r in RELATIONS])


@dataclass
class BridgingConfig:
    lam: float = -1000.0
    cluster_threshold: float = 0.6


@dataclass
class RetrievalConfig:
    length_weight: float = 0.1
    max_tokens: int = 32


@dataclass
class ProvidersConfig:
    # "stub", "remote:<base-url>", or (embedding only) "file:<path>"
    embedding: str = "stub"
    inference: str = "stub"
    entailment: str = "stub"


@dataclass
class PipelineConfig:
    search: SearchConfig = field(default_factory=SearchConfig)
    reasoner: ReasonerConfig = field(default_factory=ReasonerConfig)
    bridging: BridgingConfig = field(default_factory=BridgingConfig)
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    providers: ProvidersConfig = field(default_factory=ProvidersConfig)
    seed: int = 0
    context_window: int = 4


def _fill(cls, data: dict):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise KbwalkError(f"unknown config keys for {cls.__name__}: {sorted(unknown)}")
    return cls(**data)


def config_from_toml(text: str) -> PipelineConfig:
    data = tomllib.loads(text)
    cfg = PipelineConfig()
    if "search" in data:
        cfg.search = _fill(SearchConfig, data.pop("search"))
    if "reasoner" in data:
        cfg.reasoner = _fill(ReasonerConfig, data.pop("reasoner"))
    if "bridging" in data:
        cfg.bridging = _fill(BridgingConfig, data.pop("bridging"))
    if "retrieval" in data:
        cfg.retrieval = _fill(RetrievalConfig, data.pop("retrieval"))
    if "providers" in data:
        cfg.providers = _fill(ProvidersConfig, data.pop("providers"))
    cfg.seed = int(data.pop("seed", cfg.seed))
    cfg.context_window = int(data.pop("context_window", cfg.context_window))
    if data:
        raise KbwalkError(f"unknown config keys: {sorted(data)}")
    return cfg


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, list):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise KbwalkError(f"cannot serialize config value {v!r}")


def config_to_toml(cfg: PipelineConfig) -> str:
    lines = [f"seed = {cfg.seed}", f"context_window = {cfg.context_window}", ""]
    for section in ("search", "reasoner", "bridging", "retrieval", "providers"):
        sub = getattr(cfg, section)
        lines.append(f"[{section}]")
        for f in dataclasses.fields(sub):
            lines.append(f"{f.name} = {_toml_value(getattr(sub, f.name))}")
        lines.append("")
    return "\n".join(lines)


@dataclass
class ConversationInput:
    id: str
    turns: list[dict]  # {"speaker": str, "text": str}

    def context(self, window: int = 4) -> str:
        turns = self.turns[-window:] if window > 0 else self.turns
        return "\n".join(f"{t['speaker']}: {t['text']}" for t in turns)


def read_conversations(path) -> list[ConversationInput]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if not rec.get("turns"):
                raise KbwalkError(f"conversation {rec.get('id')!r} has no turns")
            out.append(ConversationInput(str(rec["id"]), rec["turns"]))
    return out


class ProviderSet:
    def __init__(self, cfg: ProvidersConfig, seed: int = 0):
        if cfg.embedding == "stub":
            self.embedder = StubEmbedder()
        elif cfg.embedding.startswith("remote:"):
            self.embedder = RemoteEmbedder(cfg.embedding[7:])
        elif cfg.embedding.startswith("file:"):
            self.embedder = FileEmbedder(cfg.embedding[5:])
        else:
            raise KbwalkError(f"bad embedding provider: {cfg.embedding!r}")
        if cfg.inference == "stub":
            self.inferencer = StubInferencer(seed=seed)
        elif cfg.inference.startswith("remote:"):
            self.inferencer = RemoteInferencer(cfg.inference[7:])
        else:
            raise KbwalkError(f"bad inference provider: {cfg.inference!r}")
        if cfg.entailment == "stub":
            self.entailer = StubEntailer()
        elif cfg.entailment.startswith("remote:"):
            self.entailer = RemoteEntailer(cfg.entailment[7:])
        else:
            raise KbwalkError(f"bad entailment provider: {cfg.entailment!r}")


def run_pipeline(conversation: ConversationInput, index: KnowledgeIndex,
                 config: PipelineConfig, providers: ProviderSet,
                 trace=None) -> list[RetrievalResult]:
    """Reason, bridge once, then retrieve per inference with shared history.

    Results are ordered by inference confidence (descending)."""
    context = conversation.context(config.context_window)

    try:
        relations = [RELATION_BY_NAME[name] for name in config.reasoner.relations]
        inferences = generate_inferences(
            context, providers.inferencer, providers.embedder,
            relations=relations,
            n_per_relation=config.reasoner.n_per_relation,
            k_select=config.reasoner.k_select)
    except KbwalkError as exc:
        raise PipelineStageError("reasoner", exc) from exc
    if not inferences:
        log.warning("conversation %s: reasoner produced no inferences",
                    conversation.id)
        return []

    try:
        query = make_bridge_query(context, index, lam=config.bridging.lam)
        subregion = build_subregion(query, index, providers.embedder,
                                    config.search, trace=trace)
    except KbwalkError as exc:
        raise PipelineStageError("bridging", exc) from exc

    history = []
    results = []
    try:
        for inference in sorted(inferences, key=lambda i: -i.confidence):
            rq = RetrievalQuery(context, inference, history,
                                length_weight=config.retrieval.length_weight,
                                max_tokens=config.retrieval.max_tokens)
            results.append(retrieve_for_inference(rq, subregion, index,
                                                  providers.embedder,
                                                  config.search, trace=trace))
    except KbwalkError as exc:
        raise PipelineStageError("retrieval", exc) from exc
    return results


def result_records(conversation: ConversationInput,
                   results: list[RetrievalResult],
                   index: KnowledgeIndex) -> list[dict]:
    records = []
    for res in results:
        records.append({
            "conversation_id": conversation.id,
            "inference": {
                "relation": res.inference.candidate.relation.name,
                "text": res.inference.candidate.text,
                "confidence": res.inference.confidence,
            },
            "chains": [{
                "steps": [{"sentence_id": sid, "concept": concept, "score": score}
                          for sid, concept, score in chain.steps],
                "total_value": chain.total_value,
            } for chain in res.chains],
            "knowledge": [{"id": sid, "text": index.sentences[sid].text,
                           "score": score}
                          for sid, score in res.flat_knowledge],
        })
    return records
