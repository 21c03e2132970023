"""Embedding / inference / entailment backends behind one small surface.

All providers are deterministic per instance configuration.  The stub
backends exist so the whole engine runs offline; the remote client speaks
the JSON wire protocol (POST /v1/embed, /v1/infer, /v1/entail).
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass

import numpy as np

from .errors import ProviderError
from .kb_core import extract_concepts, tokenize


@dataclass(frozen=True)
class Relation:
    name: str
    statement: str


# Natural-language statement per commonsense relation (event-centered and
# social-interaction families).
RELATIONS = (
    Relation("Causes", "causes"),
    Relation("xReason", "because"),
    Relation("HinderedBy", "can be hindered by"),
    Relation("IsBefore", "happens before"),
    Relation("IsAfter", "happens after"),
    Relation("xNeed", "but before, x needed"),
    Relation("xAttr", "X is seen as"),
    Relation("xEffect", "as a result, x will"),
    Relation("xReact", "as a result, x feels"),
    Relation("xWant", "as a result, x wants"),
    Relation("xIntent", "because x wanted"),
)

RELATION_BY_NAME = {r.name: r for r in RELATIONS}


@dataclass(frozen=True)
class InferenceCandidate:
    relation: Relation
    text: str
    token_probs: tuple[float, ...]


def fnv1a64(data: str) -> int:
    """64-bit FNV-1a over the UTF-8 bytes of `data`."""
    h = 0xCBF29CE484222325
    for byte in data.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def unit(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ProviderError("zero-norm embedding")
    return vec / norm


class EmbeddingProvider:
    """Caching base class; subclasses implement `_embed_one`."""

    dim: int
    provenance: str

    def __init__(self):
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def embed(self, texts: list[str]) -> list[np.ndarray]:
        if not texts:
            raise ProviderError("embed: empty text list")
        misses = [t for t in texts if t not in self._cache]
        if misses:
            fresh = self._embed_many(misses)
            with self._lock:
                for t, v in zip(misses, fresh):
                    self._cache[t] = v
        return [self._cache[t] for t in texts]

    def embed_one(self, text: str) -> np.ndarray:
        return self.embed([text])[0]

    def _embed_many(self, texts: list[str]) -> list[np.ndarray]:
        return [self._embed_one(t) for t in texts]

    def _embed_one(self, text: str) -> np.ndarray:
        raise NotImplementedError


class StubEmbedder(EmbeddingProvider):
    """Hashed bag-of-words embedding: each token is hashed (FNV-1a 64) to a
    bucket, counts accumulated, the vector unit-normalized."""

    provenance = "stub"

    def __init__(self, dim: int = 256):
        super().__init__()
        self.dim = dim

    def _embed_one(self, text: str) -> np.ndarray:
        if not text:
            raise ProviderError("embed: empty string")
        vec = np.zeros(self.dim, dtype=np.float64)
        tokens = tokenize(text) or [text]
        for tok in tokens:
            vec[fnv1a64(tok) % self.dim] += 1.0
        return unit(vec)


VEC_STORE_MAGIC = "KBWALK-VEC v1"


class FileEmbedder(EmbeddingProvider):
    """Read-only vector store: header `KBWALK-VEC v1 <dim>`, then lines
    `<sha256-of-text><TAB><comma-separated floats>`."""

    provenance = "file"

    def __init__(self, path):
        super().__init__()
        self.path = path
        self._store: dict[str, np.ndarray] = {}
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if header[:2] != VEC_STORE_MAGIC.split() or len(header) != 3:
                raise ProviderError(f"bad vector store header in {path}")
            self.dim = int(header[2])
            for line in fh:
                key, _, payload = line.rstrip("\n").partition("\t")
                vec = np.array([float(x) for x in payload.split(",")])
                if vec.shape[0] != self.dim:
                    raise ProviderError(f"vector store dim mismatch for {key}")
                self._store[key] = unit(vec)

    def _embed_one(self, text: str) -> np.ndarray:
        key = hashlib.sha256(text.encode("utf-8")).hexdigest()
        if key not in self._store:
            raise ProviderError(f"vector store: missing key for text {text[:40]!r}")
        return self._store[key]


def write_vector_store(path, dim: int, entries: dict[str, np.ndarray]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{VEC_STORE_MAGIC} {dim}\n")
        for text, vec in entries.items():
            key = hashlib.sha256(text.encode("utf-8")).hexdigest()
            fh.write(key + "\t" + ",".join(repr(float(x)) for x in vec) + "\n")


class RemoteClient:
    """Minimal JSON-over-HTTP client for the provider wire protocol."""

    def __init__(self, base_url: str, timeout: float = 30.0, retries: int = 2):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.retries = retries

    def post(self, endpoint: str, payload: dict) -> dict:
        import requests

        last = None
        for attempt in range(self.retries + 1):
            try:
                resp = requests.post(self.base_url + endpoint, json=payload,
                                     timeout=self.timeout)
            except requests.RequestException as exc:
                last = exc
                if attempt < self.retries:
                    time.sleep(0.5 * 2 ** attempt)
                continue
            if resp.status_code != 200:
                try:
                    msg = resp.json().get("error", resp.text)
                except json.JSONDecodeError:
                    msg = resp.text
                raise ProviderError(f"{endpoint}: server error {resp.status_code}: {msg}")
            return resp.json()
        raise ProviderError(f"{endpoint}: transport failure after "
                            f"{self.retries + 1} attempts: {last}")


class RemoteEmbedder(EmbeddingProvider):
    provenance = "remote"

    def __init__(self, base_url: str, timeout: float = 30.0, retries: int = 2):
        super().__init__()
        self.client = RemoteClient(base_url, timeout, retries)
        self.dim = None

    def _embed_many(self, texts: list[str]) -> list[np.ndarray]:
        body = self.client.post("/v1/embed", {"texts": texts})
        dim = int(body["dim"])
        if self.dim is None:
            self.dim = dim
        elif dim != self.dim:
            raise ProviderError(f"remote embed dim changed: {self.dim} -> {dim}")
        return [unit(np.asarray(v, dtype=np.float64)) for v in body["vectors"]]


class InferenceProvider:
    def infer(self, context: str, relation: Relation, n: int) -> list[InferenceCandidate]:
        raise NotImplementedError


class StubInferencer(InferenceProvider):
    """Template-instantiated candidates with synthetic seeded token_probs.

    For pipeline testing only; candidate i reads
    `<relation.statement> <i-th context concept>`.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    def infer(self, context, relation, n):
        if n < 1:
            raise ProviderError("infer: n must be >= 1")
        concepts = extract_concepts(context) or tokenize(context) or ["something"]
        out = []
        for i in range(n):
            concept = concepts[i % len(concepts)]
            text = f"{relation.statement} {concept}"
            n_tokens = max(1, len(tokenize(text)))
            # hash-derived uniforms in (0.3, 0.95]; reproducible across
            # languages, unlike a PRNG stream
            probs = tuple(
                0.3 + 0.65 * ((fnv1a64(
                    f"{self.seed}|{relation.name}|{context}|{i}|{t}")
                    % 1000000 + 1) / 1000000)
                for t in range(n_tokens))
            out.append(InferenceCandidate(relation, text, probs))
        return out


class RemoteInferencer(InferenceProvider):
    def __init__(self, base_url: str, timeout: float = 30.0, retries: int = 2):
        self.client = RemoteClient(base_url, timeout, retries)

    def infer(self, context, relation, n):
        if n < 1:
            raise ProviderError("infer: n must be >= 1")
        body = self.client.post("/v1/infer",
                                {"context": context, "relation": relation.name, "n": n})
        out = []
        for cand in body["candidates"][:n]:
            probs = tuple(float(p) for p in cand["token_probs"])
            if not probs:
                raise ProviderError("infer: candidate with empty token_probs")
            out.append(InferenceCandidate(relation, cand["text"], probs))
        return out


class EntailmentProvider:
    def entail(self, premise: str, hypothesis: str) -> float:
        raise NotImplementedError


class StubEntailer(EntailmentProvider):
    """Token-overlap ratio |tokens(p) & tokens(h)| / |tokens(h)|."""

    def entail(self, premise, hypothesis):
        if not premise or not hypothesis:
            raise ProviderError("entail: empty input")
        p = set(tokenize(premise))
        h = set(tokenize(hypothesis))
        if not h:
            return 0.0
        return len(p & h) / len(h)


class RemoteEntailer(EntailmentProvider):
    def __init__(self, base_url: str, timeout: float = 30.0, retries: int = 2):
        self.client = RemoteClient(base_url, timeout, retries)

    def entail(self, premise, hypothesis):
        if not premise or not hypothesis:
            raise ProviderError("entail: empty input")
        body = self.client.post("/v1/entail",
                                {"premise": premise, "hypothesis": hypothesis})
        return float(body["score"])
