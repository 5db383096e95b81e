import math

import numpy as np
import pytest

from kpgen.errors import DataError, TrainingError
from kpgen.term_importance import (
    MicroImportanceModel,
    SparseTermVector,
    TrainConfig,
    encode_triplets,
    flops_reg,
    init_model,
    load_model,
    load_vectors,
    loss_and_grads,
    predict,
    rank_loss_ibn,
    save_model,
    save_vectors,
    train,
)

from synth import shared_word_triplets, triplet_vocabulary


def scripted_model() -> MicroImportanceModel:
    """Vocab of 3, two one-hot tokens whose raw expansions are fixed."""
    embedding = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    projection = np.array([[1.0, -2.0, 0.0], [0.5, 3.0, -1.0]])
    return MicroImportanceModel(embedding=embedding, projection=projection, bias=np.zeros(3))


def reference_predict(model: MicroImportanceModel, term_ids) -> dict[int, float]:
    """Scalar reference for the pooled activation, loops only."""
    weights = {}
    for j in range(model.vocab_size):
        best = 0.0
        for i in term_ids:
            raw = 0.0
            for k in range(model.dim):
                raw += model.embedding[i, k] * model.projection[k, j]
            if model.bias is not None:
                raw += model.bias[j]
            value = math.log(1.0 + max(raw, 0.0))
            best = max(best, value)
        if best > 0.0:
            weights[j] = best
    return weights


class TestPredict:
    def test_hand_example_two_tokens(self):
        vec = predict(scripted_model(), [0, 1])
        assert vec.items() == pytest.approx(
            [(0, math.log(2.0)), (1, math.log(4.0))]
        )

    def test_single_token_is_plain_saturation(self):
        vec = predict(scripted_model(), [1])
        assert vec.get(0) == pytest.approx(math.log(1.5))
        assert vec.get(1) == pytest.approx(math.log(4.0))
        assert vec.get(2) == 0.0

    def test_all_negative_logits_give_empty_vector(self):
        model = scripted_model()
        model.bias = np.full(3, -10.0)
        assert len(predict(model, [0, 1])) == 0

    def test_empty_input_rejected(self):
        with pytest.raises(DataError, match="empty document"):
            predict(scripted_model(), [])

    def test_matches_scalar_reference(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            v = int(rng.integers(2, 31))
            d = int(rng.integers(1, 9))
            model = init_model(v, d, seed=int(rng.integers(10_000)))
            ids = rng.integers(0, v, size=int(rng.integers(1, 7))).tolist()
            got = dict(predict(model, ids).items())
            want = reference_predict(model, ids)
            assert got.keys() == want.keys()
            for j in want:
                assert got[j] == pytest.approx(want[j], rel=1e-12)

    def test_token_order_irrelevant(self):
        model = init_model(12, 4, seed=3)
        ids = [3, 7, 1, 7]
        assert predict(model, ids) == predict(model, list(reversed(ids)))

    def test_appending_tokens_never_decreases_weights(self):
        model = init_model(15, 4, seed=9)
        base = predict(model, [2, 5])
        extended = predict(model, [2, 5, 11, 3])
        for term_id, weight in base.items():
            assert extended.get(term_id) >= weight


class TestRankLoss:
    def test_hand_example(self):
        q = SparseTermVector({1: 2.0})
        pos = SparseTermVector({1: 1.0})
        neg = SparseTermVector({2: 5.0})
        assert rank_loss_ibn([q], [pos], [neg]) == pytest.approx(math.log(1 + math.exp(-2)))

    def test_saturated_softmax_tends_to_zero(self):
        q = SparseTermVector({1: 50.0})
        pos = SparseTermVector({1: 50.0})
        neg = SparseTermVector({2: 1.0})
        assert rank_loss_ibn([q], [pos], [neg]) == pytest.approx(0.0, abs=1e-12)

    def test_uniform_scores_batch_one(self):
        q = SparseTermVector({1: 1.0})
        pos = SparseTermVector({1: 1.0})
        neg = SparseTermVector({1: 1.0})
        assert rank_loss_ibn([q], [pos], [neg]) == pytest.approx(math.log(2.0))

    def test_strictly_decreases_as_positive_score_rises(self):
        neg = SparseTermVector({2: 1.0})
        previous = None
        for weight in (0.5, 1.0, 2.0, 4.0):
            loss = rank_loss_ibn(
                [SparseTermVector({1: 1.0})], [SparseTermVector({1: weight})], [neg]
            )
            if previous is not None:
                assert loss < previous
            previous = loss

    def test_empty_batch_rejected(self):
        with pytest.raises(DataError):
            rank_loss_ibn([], [], [])

    def test_in_batch_negatives_enter_candidate_set(self):
        # two identical items: each query's candidates include the other's
        # positive, which scores as high as its own -> loss >= log 2
        q = SparseTermVector({1: 1.0})
        pos = SparseTermVector({1: 1.0})
        neg = SparseTermVector({9: 0.001})
        loss = rank_loss_ibn([q, q], [pos, pos], [neg, neg])
        assert loss >= math.log(2.0) - 1e-9


class TestFlopsReg:
    def test_hand_example(self):
        batch = [SparseTermVector({7: 0.2}), SparseTermVector({7: 0.4})]
        assert flops_reg(batch, 10) == pytest.approx(0.09)

    def test_zero_batch(self):
        assert flops_reg([SparseTermVector({}), SparseTermVector({})], 4) == 0.0

    def test_single_vector_collapses_to_sum_of_squares(self):
        vec = SparseTermVector({0: 0.5, 3: 2.0})
        assert flops_reg([vec], 5) == pytest.approx(0.5**2 + 2.0**2)

    def test_batch_permutation_invariant(self):
        rng = np.random.default_rng(11)
        batch = [
            SparseTermVector({int(j): float(rng.uniform(0.1, 2)) for j in rng.choice(20, 5, replace=False)})
            for _ in range(6)
        ]
        value = flops_reg(batch, 20)
        assert flops_reg(list(reversed(batch)), 20) == pytest.approx(value, rel=1e-12)

    def test_vocab_id_permutation_invariant(self):
        rng = np.random.default_rng(12)
        perm = rng.permutation(20)
        batch = [SparseTermVector({3: 1.0, 7: 0.25}), SparseTermVector({3: 0.5})]
        remapped = [
            SparseTermVector({int(perm[t]): w for t, w in vec.items()}) for vec in batch
        ]
        assert flops_reg(remapped, 20) == pytest.approx(flops_reg(batch, 20), rel=1e-12)


def _random_instance(rng):
    v = int(rng.integers(5, 31))
    d = int(rng.integers(1, 9))
    b = int(rng.integers(1, 5))
    model = init_model(v, d, seed=int(rng.integers(100_000)), mirror_projection=False)
    model.bias += rng.normal(0, 0.3, size=v)
    batch = []
    for _ in range(b):
        batch.append(tuple(
            rng.integers(0, v, size=int(rng.integers(1, 7))).tolist() for _ in range(3)
        ))
    return model, batch


def _near_kink(model, batch, tol=1e-4) -> bool:
    """Finite differences are unreliable within tol of a relu kink or a
    pooling tie; such instances are resampled."""
    for triplet in batch:
        for side in triplet:
            ids = np.asarray(side, dtype=np.intp)
            raw = model.embedding[ids] @ model.projection + model.bias
            if np.any(np.abs(raw) < tol):
                return True
            z = np.log1p(np.maximum(raw, 0.0))
            if z.shape[0] > 1:
                part = np.partition(z, -2, axis=0)
                gap = part[-1] - part[-2]
                if np.any((part[-1] > 0) & (gap < tol)):
                    return True
    return False


class TestGradients:
    def test_analytic_matches_central_differences(self):
        rng = np.random.default_rng(21)
        checked = 0
        while checked < 20:
            model, batch = _random_instance(rng)
            if _near_kink(model, batch):
                continue
            _, grads = loss_and_grads(model, batch, lambda_q=0.05, lambda_d=0.03)
            h = 1e-6
            for arr, grad in zip(model.arrays(), grads.arrays()):
                flat_positions = rng.choice(arr.size, size=min(12, arr.size), replace=False)
                for flat in flat_positions:
                    idx = np.unravel_index(flat, arr.shape)
                    original = arr[idx]
                    arr[idx] = original + h
                    up, _ = loss_and_grads(model, batch, 0.05, 0.03)
                    arr[idx] = original - h
                    down, _ = loss_and_grads(model, batch, 0.05, 0.03)
                    arr[idx] = original
                    numeric = (up.total - down.total) / (2 * h)
                    denom = max(abs(numeric), abs(float(grad[idx])), 1e-6)
                    assert abs(numeric - float(grad[idx])) / denom < 1e-4
            checked += 1

    def test_internal_loss_matches_public_ops(self):
        rng = np.random.default_rng(31)
        model, batch = _random_instance(rng)
        loss, _ = loss_and_grads(model, batch, lambda_q=0.2, lambda_d=0.4)
        queries = [predict(model, t[0]) for t in batch]
        positives = [predict(model, t[1]) for t in batch]
        negatives = [predict(model, t[2]) for t in batch]
        assert loss.rank_loss == pytest.approx(
            rank_loss_ibn(queries, positives, negatives), rel=1e-9
        )
        assert loss.query_reg == pytest.approx(flops_reg(queries, model.vocab_size), rel=1e-9)
        assert loss.doc_reg == pytest.approx(
            flops_reg(positives + negatives, model.vocab_size), rel=1e-9
        )
        assert loss.total == pytest.approx(
            loss.rank_loss + 0.2 * loss.query_reg + 0.4 * loss.doc_reg
        )


class TestTraining:
    def test_zero_steps_leaves_parameters_unchanged(self):
        triplets = shared_word_triplets(8)
        vocab = triplet_vocabulary(triplets)
        encoded = encode_triplets(triplets, vocab)
        model = init_model(vocab.size, 8, seed=2)
        before = [arr.copy() for arr in model.arrays()]
        logs = train(model, encoded, TrainConfig(steps=0, dim=8))
        assert logs == []
        for arr, prev in zip(model.arrays(), before):
            assert np.array_equal(arr, prev)

    def test_deterministic_given_seed(self):
        triplets = shared_word_triplets(24)
        vocab = triplet_vocabulary(triplets)
        encoded = encode_triplets(triplets, vocab)
        cfg = TrainConfig(steps=12, batch_size=8, dim=6, seed=42)
        model_a = init_model(vocab.size, 6, seed=1)
        model_b = init_model(vocab.size, 6, seed=1)
        train(model_a, encoded, cfg)
        train(model_b, encoded, cfg)
        for a, b in zip(model_a.arrays(), model_b.arrays()):
            assert np.array_equal(a, b)

    def test_loss_decreases_on_synthetic_fixture(self):
        triplets = shared_word_triplets(60)
        vocab = triplet_vocabulary(triplets)
        encoded = encode_triplets(triplets, vocab)
        model = init_model(vocab.size, 8, seed=3)
        logs = train(model, encoded, TrainConfig(steps=60, batch_size=16, dim=8, seed=0, lr=0.1))
        assert logs[-1].loss.total < logs[0].loss.total

    def test_doc_reg_weight_reduces_nonzeros(self):
        triplets = shared_word_triplets(60)
        vocab = triplet_vocabulary(triplets)
        encoded = encode_triplets(triplets, vocab)

        def run(lambda_d: float) -> float:
            model = init_model(vocab.size, 8, seed=5)
            train(model, encoded, TrainConfig(steps=80, batch_size=16, dim=8, seed=5,
                                              lambda_d=lambda_d, lr=0.1))
            sizes = [len(predict(model, t[1])) + len(predict(model, t[2])) for t in encoded]
            return float(np.mean(sizes))

        assert run(0.1) < run(0.0)

    def test_shared_word_gets_top_weight_on_held_out_positives(self):
        all_triplets = shared_word_triplets(240, seed=13)
        train_split, held_out = all_triplets[:200], all_triplets[200:]
        vocab = triplet_vocabulary(all_triplets)
        model = init_model(vocab.size, 16, seed=1)
        train(model, encode_triplets(train_split, vocab),
              TrainConfig(steps=150, batch_size=32, dim=16, seed=0, lr=0.1))
        hits = 0
        for triplet in held_out:
            doc_ids = to_term_ids(vocab, word_tokens(triplet.positive.text))
            shared_id = to_term_ids(vocab, word_tokens(triplet.reference)[:1])[0]
            vec = predict(model, doc_ids)
            if vec and max(vec.items(), key=lambda it: it[1])[0] == shared_id:
                hits += 1
        assert hits / len(held_out) >= 0.8

    def test_non_finite_loss_aborts(self):
        triplets = shared_word_triplets(8)
        vocab = triplet_vocabulary(triplets)
        encoded = encode_triplets(triplets, vocab)
        model = init_model(vocab.size, 4, seed=2)
        model.embedding[:] = np.nan
        with pytest.raises(TrainingError, match="non-finite"):
            train(model, encoded, TrainConfig(steps=3, batch_size=4, dim=4))


class TestVectorPersistence:
    def test_round_trip(self, tmp_path):
        vectors = {
            "a": SparseTermVector({0: 0.25, 9: 1.5}, owner="a"),
            "b": SparseTermVector({3: 0.125}, owner="b"),
        }
        path = tmp_path / "vectors.jsonl"
        save_vectors(vectors, path)
        assert load_vectors(path) == vectors

    def test_full_precision_round_trip(self, tmp_path):
        weights = {1: 1 / 3, 2: math.pi, 5: 1e-300}
        path = tmp_path / "vectors.jsonl"
        save_vectors({"x": SparseTermVector(weights, owner="x")}, path)
        loaded = load_vectors(path)["x"]
        for term_id, weight in weights.items():
            assert loaded.get(term_id) == weight

    def test_negative_weight_rejected(self, tmp_path):
        path = tmp_path / "vectors.jsonl"
        path.write_text('{"id": "bad", "v": [[1, -0.5]]}\n')
        with pytest.raises(DataError, match="bad"):
            load_vectors(path)

    def test_unsorted_ids_rejected(self, tmp_path):
        path = tmp_path / "vectors.jsonl"
        path.write_text('{"id": "bad", "v": [[5, 0.5], [1, 0.5]]}\n')
        with pytest.raises(DataError, match="sorted"):
            load_vectors(path)

    def test_empty_mapping(self, tmp_path):
        path = tmp_path / "vectors.jsonl"
        save_vectors({}, path)
        assert path.exists()
        assert load_vectors(path) == {}


class TestModelPersistence:
    def test_round_trip(self, tmp_path):
        model = init_model(17, 5, seed=8)
        path = tmp_path / "model.bin"
        save_model(model, path)
        loaded = load_model(path)
        for a, b in zip(model.arrays(), loaded.arrays()):
            assert np.array_equal(a, b)

    def test_checkpoint_bytes_deterministic(self, tmp_path):
        model = init_model(9, 3, seed=4)
        p1, p2 = tmp_path / "m1.bin", tmp_path / "m2.bin"
        save_model(model, p1)
        save_model(model, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_truncated_checkpoint_rejected(self, tmp_path):
        model = init_model(9, 3, seed=4)
        path = tmp_path / "model.bin"
        save_model(model, path)
        data = path.read_bytes()
        path.write_bytes(data[:-16])
        with pytest.raises(DataError, match="truncated"):
            load_model(path)
