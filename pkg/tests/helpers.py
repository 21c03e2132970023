"""Shared test utilities: independent oracles and synthetic corpus builders.

Oracles here deliberately avoid the production code paths they check."""

import itertools

import numpy as np


# -- exact optimal transport (LP oracle) ----------------------------------

def exact_ot_cost(a, b):
    """Exact OT cost between uniform clouds, cost = 1 - cosine, via LP."""
    from scipy.optimize import linprog

    n, m = a.shape[0], b.shape[0]
    cost = (1.0 - a @ b.T).reshape(-1)
    A_eq = []
    b_eq = []
    for i in range(n):
        row = np.zeros(n * m)
        row[i * m:(i + 1) * m] = 1.0
        A_eq.append(row)
        b_eq.append(1.0 / n)
    for j in range(m):
        row = np.zeros(n * m)
        row[j::m] = 1.0
        A_eq.append(row)
        b_eq.append(1.0 / m)
    res = linprog(cost, A_eq=np.array(A_eq), b_eq=np.array(b_eq),
                  bounds=(0, None), method="highs")
    assert res.status == 0, res.message
    return float(res.fun)


# -- brute-force DPP subset oracle ----------------------------------------

def best_subset_det(L, k, exact_size=True):
    """(best_det, best_subset) by exhaustive determinant maximization.

    By default over subsets of size exactly min(k, n); pass
    exact_size=False to range over all non-empty sizes <= k."""
    n = L.shape[0]
    sizes = [min(k, n)] if exact_size else range(1, min(k, n) + 1)
    best_det, best_sub = -np.inf, ()
    for size in sizes:
        for sub in itertools.combinations(range(n), size):
            d = float(np.linalg.det(L[np.ix_(sub, sub)]))
            if d > best_det:
                best_det, best_sub = d, sub
    return best_det, best_sub


def random_psd_kernel(rng, n, diag_low=1.5, diag_high=4.0):
    """Random PSD quality/diversity kernel with a diagonal kept above 1 so
    greedy marginal log-det gains stay mostly positive."""
    d = 3 * max(2, n)
    feats = rng.normal(size=(n, d))
    feats /= np.linalg.norm(feats, axis=1, keepdims=True)
    S = feats @ feats.T
    np.fill_diagonal(S, 1.0)
    q = rng.uniform(diag_low, diag_high, size=n)
    L = np.sqrt(np.outer(q, q)) * S
    # guarantee PSD despite float wobble
    w = np.linalg.eigvalsh(L)
    if w[0] < 0:
        L += (1e-9 - w[0]) * np.eye(n)
    return L


# -- random unit vectors ---------------------------------------------------

def random_unit_rows(rng, n, dim):
    m = rng.normal(size=(n, dim))
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    return np.ascontiguousarray(m)


# -- synthetic corpora -----------------------------------------------------

def write_tsv(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for term, text, score in rows:
            fh.write(f"{term}\t{text}\t{score}\n")


def topic_corpus_rows(rng, n_topics=10, sentences_per_topic=50, fillers=40):
    """Clustered corpus: per topic, many sentences sharing core tokens (so
    embedding-similarity top-k is token-redundant), linked across topics by
    shared bridge words."""
    vocab = [f"word{w}" for w in range(fillers)]
    rows = []
    for t in range(n_topics):
        core = [f"topic{t}", f"thing{t}", f"place{t}"]
        bridge = f"topic{(t + 1) % n_topics}"
        for s in range(sentences_per_topic):
            extra = list(rng.choice(vocab, size=2, replace=False))
            link = [bridge] if s % 5 == 0 else []
            words = core + extra + link
            text = f"{core[0]} involves {' and '.join(words[1:])}."
            rows.append((core[0], text, round(float(rng.uniform(0.5, 1.0)), 3)))
    return rows


# -- hand-built indexes ----------------------------------------------------

def build_index(tmp_path, rows, partition=None, embedder=None, threshold=0.6):
    """Ingest `rows` and either cluster with `embedder` or force the given
    concept `partition` (list of concept-id lists covering every concept)."""
    from kbwalk.kb_core import NodeGroup, build_node_groups, ingest_corpus
    from kbwalk.providers import StubEmbedder

    path = tmp_path / "kb.tsv"
    write_tsv(path, rows)
    index = ingest_corpus(path)
    if partition is not None:
        covered = {c for part in partition for c in part}
        assert covered == set(index.concepts), \
            f"partition mismatch: {covered ^ set(index.concepts)}"
        for g, part in enumerate(partition):
            gid = f"g{g:06d}"
            sids = set()
            for cid in part:
                index.concepts[cid].group_id = gid
                sids |= index.concepts[cid].sentence_ids
            index.groups[gid] = NodeGroup(gid, set(part), sids)
    else:
        build_node_groups(index, embedder or StubEmbedder(), threshold)
    return index


# -- path enumeration oracle for the MCTS engine --------------------------

def enumerate_paths(index, seed_concepts, mark_fn, horizon):
    """All maximal sentence paths reachable within `horizon` hops.

    Expansion mirrors the engine's action space with no pruning: candidates
    of a state are the group sentences of its marked concept, minus the
    path so far.  `mark_fn(sentence)` supplies the marked concept."""
    roots = set()
    for c in seed_concepts:
        if c in index.concepts:
            roots |= index.group_sentence_ids(c)

    paths = []

    def walk(path, marked):
        depth = len(path)
        if depth >= horizon:
            paths.append(tuple(path))
            return
        if depth == 0:
            cands = sorted(roots)
        else:
            cands = sorted(index.group_sentence_ids(marked) - set(path))
        if not cands:
            if path:
                paths.append(tuple(path))
            return
        for sid in cands:
            walk(path + [sid], mark_fn(index.sentences[sid]))

    walk([], None)
    return paths
