import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kbwalk.errors import IngestError, LookupError_
from kbwalk.kb_core import (STOPWORDS, IngestConfig, build_node_groups,
                            extract_concepts, group_sentences, ingest_corpus,
                            load_index, save_index, tokenize)
from kbwalk.providers import StubEmbedder

from helpers import write_tsv


class TestExtractConcepts:
    def test_basic_sentence(self):
        # hand-applied: lowercase, drop stopwords, keep order
        assert extract_concepts("Trees produce oxygen.") == [
            "trees", "produce", "oxygen"]

    def test_all_stopwords(self):
        assert extract_concepts("a the of") == []

    def test_case_fold_dedup(self):
        assert extract_concepts("Oxygen oxygen OXYGEN") == ["oxygen"]

    def test_short_tokens_dropped(self):
        assert extract_concepts("x y oxygen") == ["oxygen"]


class TestIngest:
    def test_row_concepts_include_term(self, tmp_path):
        path = tmp_path / "kb.tsv"
        write_tsv(path, [("tree", "Trees produce oxygen.", 0.9)])
        index = ingest_corpus(path)
        (sent,) = index.sentences.values()
        assert sent.source_term == "tree"
        assert "tree" in sent.concepts and "oxygen" in sent.concepts

    def test_empty_file_hard_error(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("")
        with pytest.raises(IngestError):
            ingest_corpus(path)

    def test_dedup_keeps_higher_score(self, tmp_path):
        path = tmp_path / "kb.tsv"
        write_tsv(path, [("tree", "Trees produce oxygen.", 0.3),
                         ("tree", "Trees produce oxygen.", 0.8)])
        index = ingest_corpus(path)
        assert len(index.sentences) == 1
        assert next(iter(index.sentences.values())).score == 0.8

    def test_malformed_rows_skipped(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("tree\tTrees produce oxygen.\t0.9\n"
                        "badrow-without-tabs\n"
                        "leaf\tLeaves are green.\tnot-a-number\n")
        index = ingest_corpus(path)
        assert len(index.sentences) == 1
        assert index.stats.skipped == 2

    def test_header_detected(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("TERM\tSENTENCE\tSCORE\n"
                        "tree\tTrees produce oxygen.\t0.9\n")
        index = ingest_corpus(path)
        assert len(index.sentences) == 1

    def test_max_rows(self, tmp_path):
        path = tmp_path / "kb.tsv"
        write_tsv(path, [(f"t{i}", f"Thing t{i} exists somewhere.", 0.5)
                         for i in range(10)])
        index = ingest_corpus(path, IngestConfig(max_rows=4))
        assert len(index.sentences) == 4

    def test_idempotent_snapshot(self, tmp_path):
        path = tmp_path / "kb.tsv"
        write_tsv(path, [("tree", "Trees produce oxygen.", 0.9),
                         ("oxygen", "Oxygen supports combustion.", 0.7)])
        out1, out2 = tmp_path / "a.idx", tmp_path / "b.idx"
        emb = StubEmbedder()
        save_index(build_node_groups(ingest_corpus(path), emb, 0.6), out1)
        save_index(build_node_groups(ingest_corpus(path), emb, 0.6), out2)
        assert out1.read_bytes() == out2.read_bytes()

    def test_snapshot_round_trip(self, tmp_path):
        path = tmp_path / "kb.tsv"
        write_tsv(path, [("tree", "Trees produce oxygen.", 0.9),
                         ("oxygen", "Oxygen supports combustion.", 0.7)])
        index = build_node_groups(ingest_corpus(path), StubEmbedder(), 0.6)
        snap = tmp_path / "kb.idx"
        save_index(index, snap)
        loaded = load_index(snap)
        assert set(loaded.sentences) == set(index.sentences)
        assert set(loaded.concepts) == set(index.concepts)
        for gid, g in index.groups.items():
            assert loaded.groups[gid].member_concepts == g.member_concepts
            assert loaded.groups[gid].sentence_ids == g.sentence_ids


def _index_from_rows(tmp_path, rows, threshold=0.6):
    path = tmp_path / "kb.tsv"
    write_tsv(path, rows)
    return build_node_groups(ingest_corpus(path), StubEmbedder(), threshold)


class TestNodeGroups:
    def test_threshold_one_all_singletons(self, tmp_path):
        rows = [("tree", "Trees produce oxygen.", 0.9),
                ("river", "Rivers carry water downstream.", 0.8)]
        index = _index_from_rows(tmp_path, rows, threshold=1.0)
        assert len(index.groups) == len(index.concepts)

    def test_threshold_zero_single_group(self, tmp_path):
        rows = [("tree", "Trees produce oxygen.", 0.9),
                ("river", "Rivers carry water downstream.", 0.8)]
        index = _index_from_rows(tmp_path, rows, threshold=0.0)
        assert len(index.groups) == 1

    def test_planted_orthogonal_clusters(self, tmp_path):
        # Two planted clusters of synthetic unit vectors; verified against
        # the exhaustive pairwise-similarity partition.
        class PlantedEmbedder:
            def __init__(self):
                self.axes = {"alpha": 0, "alphaish": 0, "alphaoid": 0,
                             "beta": 1, "betaish": 1, "betaoid": 1}

            def embed(self, texts):
                out = []
                for t in texts:
                    v = np.zeros(4)
                    v[self.axes[t]] = 1.0
                    # slight in-cluster variation, still cos >= 0.9 in-cluster
                    v[2 + self.axes[t]] = 0.2 if t.endswith("ish") else 0.0
                    out.append(v / np.linalg.norm(v))
                return out

        rows = [(t, f"{t} belongs with friends.", 0.5)
                for t in ["alpha", "alphaish", "alphaoid", "beta", "betaish",
                          "betaoid"]]
        path = tmp_path / "kb.tsv"
        # restrict concepts to the planted terms only
        write_tsv(path, [(t, t, s) for t, _, s in rows])
        index = ingest_corpus(path)
        build_node_groups(index, PlantedEmbedder(), threshold=0.6)
        partition = {frozenset(g.member_concepts) for g in index.groups.values()}
        assert partition == {frozenset({"alpha", "alphaish", "alphaoid"}),
                             frozenset({"beta", "betaish", "betaoid"})}

    def test_partition_property(self, tmp_path):
        rng = np.random.default_rng(7)
        rows = [(f"term{i}", f"term{i} relates to item{int(rng.integers(0, 20))} "
                             f"and stuff{int(rng.integers(0, 10))}.", 0.5)
                for i in range(50)]
        index = _index_from_rows(tmp_path, rows, threshold=0.8)
        all_members = [c for g in index.groups.values() for c in g.member_concepts]
        assert len(all_members) == len(index.concepts)
        assert len(set(all_members)) == len(all_members)

    def test_bidirectional_links(self, tmp_path):
        rows = [("tree", "Trees produce oxygen and shade.", 0.9),
                ("oxygen", "Oxygen supports combustion.", 0.7)]
        index = _index_from_rows(tmp_path, rows)
        for sid, sent in index.sentences.items():
            for c in sent.concepts:
                assert sid in index.concepts[c].sentence_ids
        for cid, node in index.concepts.items():
            for sid in node.sentence_ids:
                assert cid in index.sentences[sid].concepts


class TestGroupSentences:
    def test_singleton_group(self, tmp_path):
        index = _index_from_rows(
            tmp_path, [("tree", "Trees produce oxygen.", 0.9)], threshold=1.0)
        sents = group_sentences(index, "tree")
        assert {s.id for s in sents} == index.concepts["tree"].sentence_ids

    def test_union_of_members(self, tmp_path):
        index = _index_from_rows(
            tmp_path,
            [("alpha", "Alpha pairs with beta.", 0.5),
             ("beta", "Beta follows alpha around.", 0.5)],
            threshold=0.0)
        got = {s.id for s in group_sentences(index, "alpha")}
        assert got == set(index.sentences)

    def test_unknown_concept(self, tmp_path):
        index = _index_from_rows(tmp_path, [("tree", "Trees exist.", 0.5)])
        with pytest.raises(LookupError_):
            group_sentences(index, "nosuchconcept")

    @settings(max_examples=15, deadline=None)
    @given(st.data())
    def test_matches_brute_force_scan(self, tmp_path_factory, data):
        # randomized index <= 500 sentences vs brute-force group-member scan
        rng = np.random.default_rng(data.draw(st.integers(0, 10 ** 6)))
        n = int(rng.integers(5, 60))
        rows = [(f"t{int(rng.integers(0, 12))}",
                 f"fact number{i} mentions t{int(rng.integers(0, 12))} "
                 f"and t{int(rng.integers(0, 12))}.", 0.5)
                for i in range(n)]
        tmp = tmp_path_factory.mktemp("ggs")
        index = _index_from_rows(tmp, rows, threshold=0.9)
        concept = data.draw(st.sampled_from(sorted(index.concepts)))
        members = index.group_members(concept)
        brute = {s.id for s in index.sentences.values()
                 if set(s.concepts) & members}
        assert {s.id for s in group_sentences(index, concept)} == brute
