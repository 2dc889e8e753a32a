import math

import numpy as np
import pytest

from conftest import TOY_BANK_PARAMS, make_toy_bank_store
import oracles
from sensepriv import (
    EmbeddingStore,
    EgoNetwork,
    InductionParams,
    SenseEntry,
    SenseInventory,
    build_ego_network,
    chinese_whispers,
    cosine_similarity,
    induce_inventory,
    mean_pairwise_distance,
    pool_sense_vector,
    within_sense_distance_stats,
)

# Two tight orthogonal pairs plus an ego word between them.
PAIR_VECTORS = {
    "river": (1.0, 0.05),
    "shore": (1.0, -0.05),
    "money": (0.05, 1.0),
    "loan": (-0.05, 1.0),
    "bank": (0.7, 0.7),
}


def make_pair_store():
    return EmbeddingStore.from_pairs(list(PAIR_VECTORS.items()))


def edge_set(network):
    return {frozenset((u, v)) for u, v, _ in network.edges}


class TestEgoNetwork:
    def test_top1_keeps_only_within_pair_edges(self):
        store = make_pair_store()
        params = InductionParams(neighborhood_size=4, edge_top_k=1, min_cluster_size=2)
        network = build_ego_network(store, "bank", params)
        assert set(network.nodes) == {"river", "shore", "money", "loan"}
        assert edge_set(network) == {
            frozenset(("river", "shore")),
            frozenset(("money", "loan")),
        }

    def test_nodes_are_all_other_words_when_neighborhood_covers_vocab(self):
        store = make_pair_store()
        params = InductionParams(neighborhood_size=10, edge_top_k=1, min_cluster_size=2)
        network = build_ego_network(store, "river", params)
        assert set(network.nodes) == set(PAIR_VECTORS) - {"river"}
        assert "river" not in network.nodes

    def test_max_top_k_gives_complete_graph(self):
        store = make_pair_store()
        params = InductionParams(neighborhood_size=4, edge_top_k=4, min_cluster_size=2)
        network = build_ego_network(store, "bank", params)
        assert len(edge_set(network)) == math.comb(4, 2)

    def test_edge_weights_are_endpoint_cosines(self):
        store = make_pair_store()
        params = InductionParams(neighborhood_size=4, edge_top_k=2, min_cluster_size=2)
        network = build_ego_network(store, "bank", params)
        assert network.edges
        for u, v, w in network.edges:
            assert u != v
            assert "bank" not in (u, v)
            want = cosine_similarity(store.lookup(u), store.lookup(v))
            assert w == pytest.approx(want, abs=1e-12)

    def test_neighborhood_size_caps_node_count(self):
        store = make_pair_store()
        params = InductionParams(neighborhood_size=2, edge_top_k=1, min_cluster_size=2)
        network = build_ego_network(store, "bank", params)
        assert len(network.nodes) == 2

    def test_singleton_vocab_gives_empty_network(self):
        store = EmbeddingStore.from_pairs([("only", (1.0, 0.0))])
        params = InductionParams(neighborhood_size=5, edge_top_k=1, min_cluster_size=2)
        network = build_ego_network(store, "only", params)
        assert network.nodes == []
        assert network.edges == []


class TestParams:
    def test_positive_fields_enforced(self):
        with pytest.raises(ValueError):
            InductionParams(neighborhood_size=0)
        with pytest.raises(ValueError):
            InductionParams(cw_iterations=0)

    def test_top_k_bounded_by_neighborhood(self):
        with pytest.raises(ValueError):
            InductionParams(neighborhood_size=3, edge_top_k=4)


class TestChineseWhispers:
    def test_two_disjoint_triangles(self):
        nodes = ["a", "b", "c", "d", "e", "f"]
        edges = [
            ("a", "b", 1.0),
            ("b", "c", 1.0),
            ("a", "c", 1.0),
            ("d", "e", 1.0),
            ("e", "f", 1.0),
            ("d", "f", 1.0),
        ]
        labels = chinese_whispers(EgoNetwork("_", nodes, edges), iterations=20, seed=3)
        assert labels["a"] == labels["b"] == labels["c"]
        assert labels["d"] == labels["e"] == labels["f"]
        assert labels["a"] != labels["d"]

    def test_single_node(self):
        labels = chinese_whispers(EgoNetwork("_", ["solo"], []), iterations=5, seed=0)
        assert list(labels) == ["solo"]

    def test_empty_graph(self):
        assert chinese_whispers(EgoNetwork("_", [], []), iterations=5, seed=0) == {}

    def test_planted_two_cliques_with_weak_bridge(self):
        nodes = [f"a{i}" for i in range(10)] + [f"b{i}" for i in range(10)]
        edges = []
        for group in ("a", "b"):
            for i in range(10):
                for j in range(i + 1, 10):
                    edges.append((f"{group}{i}", f"{group}{j}", 0.9))
        edges.append(("a0", "b0", 0.1))
        labels = chinese_whispers(EgoNetwork("_", nodes, edges), iterations=30, seed=0)
        group_a = {labels[f"a{i}"] for i in range(10)}
        group_b = {labels[f"b{i}"] for i in range(10)}
        assert len(group_a) == 1
        assert len(group_b) == 1
        assert group_a != group_b

    def test_seed_determinism(self):
        nodes = [f"n{i}" for i in range(12)]
        rng = np.random.default_rng(8)
        edges = []
        for i in range(12):
            for j in range(i + 1, 12):
                if rng.random() < 0.4:
                    edges.append((nodes[i], nodes[j], float(rng.uniform(0.1, 1.0))))
        graph = EgoNetwork("_", nodes, edges)
        assert chinese_whispers(graph, 20, seed=7) == chinese_whispers(graph, 20, seed=7)


class TestPooling:
    def test_single_member_keeps_its_vector(self):
        store = make_pair_store()
        pooled, cosines = pool_sense_vector(store, "bank", ["river"])
        np.testing.assert_allclose(pooled, store.lookup("river"), rtol=1e-15)
        assert len(cosines) == 1

    def test_weighted_mean_example(self):
        store = EmbeddingStore.from_pairs(
            [("ego", (1.0, 0.0)), ("a", (1.0, 0.0)), ("b", (0.6, 0.8))]
        )
        pooled, cosines = pool_sense_vector(store, "ego", ["a", "b"])
        np.testing.assert_allclose(pooled, [0.85, 0.3], rtol=1e-12)
        assert cosines == pytest.approx([1.0, 0.6], abs=1e-12)

    def test_equal_weights_give_arithmetic_mean(self):
        store = EmbeddingStore.from_pairs(
            [("ego", (1.0, 0.0)), ("a", (0.8, 0.6)), ("b", (0.8, -0.6))]
        )
        pooled, _ = pool_sense_vector(store, "ego", ["a", "b"])
        np.testing.assert_allclose(pooled, [0.8, 0.0], atol=1e-15)

    def test_all_nonpositive_weights_fall_back_to_plain_mean(self):
        store = EmbeddingStore.from_pairs(
            [("ego", (1.0, 0.0)), ("c", (-1.0, 0.0)), ("d", (0.0, -1.0))]
        )
        pooled, cosines = pool_sense_vector(store, "ego", ["c", "d"])
        np.testing.assert_allclose(pooled, [-0.5, -0.5], rtol=1e-15)
        assert cosines == pytest.approx([-1.0, 0.0], abs=1e-12)

    def test_empty_members_rejected(self):
        store = make_pair_store()
        with pytest.raises(ValueError):
            pool_sense_vector(store, "bank", [])


class TestInduceInventory:
    def test_toy_bank_gets_two_senses(self, toy_bank_store, toy_bank_inventory):
        assert toy_bank_inventory.num_senses("bank") == 2
        senses = toy_bank_inventory.senses("bank")
        members0 = {m for m, _ in senses[0].members}
        members1 = {m for m, _ in senses[1].members}
        assert members0 == {"river", "shore", "stream", "sunset", "water"}
        assert members1 == {"cash", "deposit", "loan", "money"}

    def test_toy_bank_sense_vectors_point_at_their_topics(self, toy_bank_store, toy_bank_inventory):
        senses = toy_bank_inventory.senses("bank")
        geo = senses[0].vector
        fin = senses[1].vector
        river = toy_bank_store.lookup("river")
        money = toy_bank_store.lookup("money")
        assert cosine_similarity(geo, river) > cosine_similarity(geo, money)
        assert cosine_similarity(fin, money) > cosine_similarity(fin, river)

    def test_pooled_vectors_recompute_from_members(self, toy_bank_store, toy_bank_inventory):
        checked = 0
        for word in toy_bank_inventory.words():
            for sense in toy_bank_inventory.senses(word):
                if not sense.members:
                    continue
                pooled, cosines = pool_sense_vector(
                    toy_bank_store, word, [m for m, _ in sense.members]
                )
                np.testing.assert_allclose(sense.vector, pooled, rtol=1e-12)
                assert [w for _, w in sense.members] == pytest.approx(cosines, abs=1e-12)
                checked += 1
        assert checked > 0

    def test_every_vocabulary_word_is_covered(self, toy_bank_store, toy_bank_inventory):
        assert set(toy_bank_inventory.words()) == set(toy_bank_store.tokens)
        for word in toy_bank_store.tokens:
            assert toy_bank_inventory.num_senses(word) >= 1

    def test_equal_size_clusters_ordered_by_smallest_member(self):
        store = make_pair_store()
        params = InductionParams(
            neighborhood_size=4, edge_top_k=1, cw_iterations=20, min_cluster_size=2, seed=5
        )
        inventory = induce_inventory(store, params)
        senses = inventory.senses("bank")
        assert len(senses) == 2
        # both clusters have size 2; "loan" < "river" decides the order
        assert [m for m, _ in senses[0].members] == ["loan", "money"]
        assert [m for m, _ in senses[1].members] == ["river", "shore"]

    def test_monosemous_fallback_keeps_own_vector(self):
        store = EmbeddingStore(
            [f"t{i}" for i in range(5)], np.eye(5, dtype=np.float64)
        )
        params = InductionParams(
            neighborhood_size=4, edge_top_k=2, cw_iterations=10, min_cluster_size=5
        )
        inventory = induce_inventory(store, params)
        for word in store.tokens:
            senses = inventory.senses(word)
            assert len(senses) == 1
            assert senses[0].sense_id == f"{word}#0"
            assert senses[0].members == []
            np.testing.assert_array_equal(senses[0].vector, store.lookup(word))

    def test_singleton_vocab(self):
        store = EmbeddingStore.from_pairs([("only", (2.0, 1.0))])
        params = InductionParams(neighborhood_size=1, edge_top_k=1, min_cluster_size=1)
        inventory = induce_inventory(store, params)
        assert inventory.senses("only")[0].members == []
        np.testing.assert_array_equal(inventory.senses("only")[0].vector, [2.0, 1.0])

    def test_rerun_is_byte_identical(self, tmp_path):
        store = make_toy_bank_store()
        a = induce_inventory(store, TOY_BANK_PARAMS)
        b = induce_inventory(store, TOY_BANK_PARAMS)
        pa, pb = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        a.save(str(pa))
        b.save(str(pb))
        assert pa.read_bytes() == pb.read_bytes()

    def test_thread_count_does_not_change_result(self, tmp_path):
        store = make_toy_bank_store()
        a = induce_inventory(store, TOY_BANK_PARAMS, threads=1)
        b = induce_inventory(store, TOY_BANK_PARAMS, threads=4)
        pa, pb = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        a.save(str(pa))
        b.save(str(pb))
        assert pa.read_bytes() == pb.read_bytes()

    def test_save_load_round_trip(self, tmp_path, toy_bank_inventory):
        path = tmp_path / "inv.jsonl"
        toy_bank_inventory.save(str(path))
        loaded = SenseInventory.load(str(path))
        assert loaded.words() == toy_bank_inventory.words()
        for word in loaded.words():
            got = loaded.senses(word)
            want = toy_bank_inventory.senses(word)
            assert [s.sense_id for s in got] == [s.sense_id for s in want]
            for sg, sw in zip(got, want):
                np.testing.assert_array_equal(sg.vector, sw.vector)
                assert sg.members == sw.members

    def test_planted_two_topic_words_get_two_senses(self):
        hits = 0
        for seed in range(10):
            rng = np.random.default_rng((321, seed))
            base_a = rng.normal(size=6)
            base_b = rng.normal(size=6)
            pairs = [("w", base_a + base_b)]
            for i in range(5):
                pairs.append((f"a{i}", base_a + 0.05 * rng.normal(size=6)))
                pairs.append((f"b{i}", base_b + 0.05 * rng.normal(size=6)))
            store = EmbeddingStore.from_pairs(pairs)
            params = InductionParams(
                neighborhood_size=10, edge_top_k=3, cw_iterations=20, min_cluster_size=3, seed=seed
            )
            inventory = induce_inventory(store, params)
            if inventory.num_senses("w") == 2:
                hits += 1
        assert hits >= 9


class TestProjectionIndex:
    def test_flattened_view_is_consistent(self, toy_bank_inventory):
        proj = toy_bank_inventory.projection_index()
        assert len(proj.ids) == len(set(proj.ids))
        assert proj.matrix.shape[0] == len(proj.ids)
        for i, sense_id in enumerate(proj.ids):
            word = proj.words[i]
            assert sense_id.startswith(word + "#")
            k = int(sense_id.rsplit("#", 1)[1])
            np.testing.assert_array_equal(
                proj.matrix[i], toy_bank_inventory.senses(word)[k].vector
            )
        by_rank = sorted(range(len(proj.ids)), key=lambda i: proj.rank[i])
        assert [proj.ids[i] for i in by_rank] == sorted(proj.ids)


class TestInventoryValidation:
    def test_inconsistent_sense_ids_rejected(self):
        entry = SenseEntry("w#1", np.array([1.0]), [])
        with pytest.raises(ValueError):
            SenseInventory({"w": [entry]})

    def test_empty_inventory_rejected(self):
        with pytest.raises(ValueError):
            SenseInventory({})


class TestWithinSenseStats:
    def make_store(self):
        return EmbeddingStore.from_pairs(
            [("w", (0.5, 0.0)), ("v", (0.0, 0.5)), ("u", (1.0, 1.0))]
        )

    def test_two_and_three_sense_rows(self):
        entries = {
            "w": [
                SenseEntry("w#0", np.array([0.0, 0.0]), []),
                SenseEntry("w#1", np.array([1.0, 0.0]), []),
            ],
            "v": [
                SenseEntry("v#0", np.array([0.0, 0.0]), []),
                SenseEntry("v#1", np.array([1.0, 0.0]), []),
                SenseEntry("v#2", np.array([0.0, 1.0]), []),
            ],
            "u": [SenseEntry("u#0", np.array([1.0, 1.0]), [])],
        }
        stats = within_sense_distance_stats(SenseInventory(entries), self.make_store(), 3, seed=0)
        assert len(stats.rows) == 2
        assert stats.rows[0][:2] == (2, 1)
        assert stats.rows[0][2] == pytest.approx(1.0, rel=1e-15)
        assert stats.rows[1][:2] == (3, 1)
        assert stats.rows[1][2] == pytest.approx((2.0 + math.sqrt(2.0)) / 3.0, rel=1e-12)

    def test_monosemous_inventory_has_no_rows(self):
        entries = {
            "w": [SenseEntry("w#0", np.array([0.5, 0.0]), [])],
            "v": [SenseEntry("v#0", np.array([0.0, 0.5]), [])],
        }
        stats = within_sense_distance_stats(SenseInventory(entries), self.make_store(), 3, seed=0)
        assert stats.rows == []
        assert stats.baseline > 0.0

    def test_toy_bank_rows_match_oracle_recompute(self, toy_bank_store, toy_bank_inventory):
        stats = within_sense_distance_stats(toy_bank_inventory, toy_bank_store)
        # every toy word straddles both topic clusters, so each gets 2 senses
        assert len(stats.rows) == 1
        count, word_count, mean_distance = stats.rows[0]
        assert count == 2
        assert word_count == len(toy_bank_store)
        per_word = []
        for senses in toy_bank_inventory.entries.values():
            vectors = [np.asarray(s.vector) for s in senses]
            per_word.append(oracles.all_pairs_mean(np.asarray(vectors)))
        assert mean_distance == pytest.approx(np.mean(per_word), rel=1e-12)
        assert stats.baseline == pytest.approx(
            mean_pairwise_distance(toy_bank_store, len(toy_bank_store), seed=0), rel=1e-12
        )
