"""kbwalk: reasoning-aware knowledge retrieval by rollout-free MCTS over a
concept-linked commonsense sentence corpus."""

from .kb_core import (IngestConfig, KnowledgeIndex, KnowledgeSentence,
                      build_node_groups, extract_concepts, group_sentences,
                      ingest_corpus, load_index, save_index, tokenize)
from .mcts import KnowledgeChain, SearchConfig, SearchState
from .pipeline import (ConversationInput, PipelineConfig, ProviderSet,
                       config_from_toml, config_to_toml, run_pipeline)

__version__ = "0.1.0"

__all__ = [
    "ConversationInput", "IngestConfig", "KnowledgeChain", "KnowledgeIndex",
    "KnowledgeSentence", "PipelineConfig", "ProviderSet", "SearchConfig",
    "SearchState", "build_node_groups", "config_from_toml", "config_to_toml",
    "extract_concepts", "group_sentences", "ingest_corpus", "load_index",
    "run_pipeline", "save_index", "tokenize", "__version__",
]
