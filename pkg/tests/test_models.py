import hashlib
import itertools
import json
import struct

import numpy as np
import pytest

from travelscout.errors import (ChecksumMismatch, DimensionMismatch,
                                NegativeFeature, ProfileMismatch,
                                SingleClassInput, VersionMismatch)
from travelscout.features import FeatureConfig, SparseVector
from travelscout.models import (HINGE, LOGISTIC, LinearSGDClassifier,
                                MLPClassifier, MultinomialNaiveBayes,
                                TrainConfig, init_params, linear_loss_grad,
                                load_model, make_model, mlp_loss_grads,
                                model_from_bytes, model_to_bytes,
                                predict_score, save_model, sigmoid)

DIM = 1024


def vec(pairs, dim=DIM):
    pairs = sorted(pairs)
    return SparseVector(np.array([i for i, _ in pairs], dtype=np.int64),
                        np.array([w for _, w in pairs], dtype=np.float64), dim)


def count_vec(counts, dim):
    return vec([(j, c) for j, c in enumerate(counts) if c], dim)


def random_sparse(rng, dim=DIM, nnz=8, signed=True):
    idx = np.sort(rng.choice(dim, nnz, replace=False))
    w = rng.standard_normal(nnz) if signed else rng.integers(1, 4, nnz).astype(float)
    w[w == 0] = 1.0
    return SparseVector(idx, w, dim)


# --- multinomial naive Bayes -------------------------------------------

def bayes_oracle(train_counts, train_labels, alpha, test_counts):
    """Direct product-form Bayes rule, no logs: the independent check."""
    dim = len(test_counts)
    post = []
    n = len(train_labels)
    for c in (0, 1):
        rows = [x for x, y in zip(train_counts, train_labels) if y == c]
        prior = len(rows) / n
        col = [sum(r[j] for r in rows) for j in range(dim)]
        total = sum(col)
        like = 1.0
        for j, x_j in enumerate(test_counts):
            like *= ((alpha + col[j]) / (alpha * dim + total)) ** x_j
        post.append(prior * like)
    return post[1] / (post[0] + post[1])


def enumerate_mnb_instances():
    """Every (n_docs, dim, label pattern) combination with n_docs <= 5 and
    dim <= 10, counts <= 3 filled in from a seeded generator."""
    rng = np.random.default_rng(12345)
    for n_docs in range(2, 6):
        for dim in (2, 3, 5, 10):
            for labels in itertools.product((0, 1), repeat=n_docs):
                if len(set(labels)) < 2:
                    continue
                counts = rng.integers(0, 4, size=(n_docs, dim))
                test = rng.integers(0, 4, size=dim)
                yield counts.tolist(), list(labels), test.tolist(), dim


def test_mnb_matches_bayes_oracle_exhaustively():
    checked = 0
    for counts, labels, test, dim in enumerate_mnb_instances():
        model = MultinomialNaiveBayes(alpha=1.0)
        model.fit([count_vec(c, dim) for c in counts], labels)
        got = float(model.predict_proba([count_vec(test, dim)])[0])
        want = bayes_oracle(counts, labels, 1.0, test)
        assert abs(got - want) < 1e-9, (counts, labels, test)
        checked += 1
    assert checked > 100


def test_mnb_toy_instance_hand_checked():
    X = [count_vec([2, 1, 0], 3), count_vec([3, 0, 0], 3),
         count_vec([0, 1, 2], 3), count_vec([0, 0, 3], 3)]
    y = [1, 1, 0, 0]
    model = MultinomialNaiveBayes().fit(X, y)
    probe = count_vec([1, 0, 1], 3)
    want = bayes_oracle([[2, 1, 0], [3, 0, 0], [0, 1, 2], [0, 0, 3]], y, 1.0,
                        [1, 0, 1])
    assert abs(float(model.predict_proba([probe])[0]) - want) < 1e-9


def test_mnb_balanced_prior():
    model = MultinomialNaiveBayes().fit(
        [count_vec([1, 0], 2), count_vec([0, 1], 2)], [0, 1])
    np.testing.assert_allclose(model.log_prior_, np.log([0.5, 0.5]))
    assert abs(np.exp(model.log_prior_).sum() - 1.0) < 1e-9


def test_mnb_alpha_saturation():
    # enormous smoothing washes out the likelihoods; posterior -> prior
    X = [count_vec([3, 0], 2), count_vec([0, 3], 2), count_vec([0, 2], 2)]
    y = [0, 1, 1]
    model = MultinomialNaiveBayes(alpha=1e12).fit(X, y)
    score = float(model.predict_proba([count_vec([2, 0], 2)])[0])
    assert abs(score - 2 / 3) < 1e-6


def test_mnb_symmetric_instance_scores_half():
    X = [count_vec([2, 0], 2), count_vec([0, 2], 2)]
    model = MultinomialNaiveBayes().fit(X, [1, 0])
    assert abs(float(model.predict_proba([count_vec([1, 1], 2)])[0]) - 0.5) < 1e-12


def test_mnb_rejects_single_class_and_negative():
    with pytest.raises(SingleClassInput):
        MultinomialNaiveBayes().fit([count_vec([1], 1024)] * 2, [1, 1])
    with pytest.raises((NegativeFeature, ProfileMismatch)):
        MultinomialNaiveBayes().fit([vec([(0, -1.0)]), vec([(1, 1.0)])], [0, 1])


# --- gradient checks ---------------------------------------------------

def central_diff(f, x0, eps=1e-6):
    grad = np.empty_like(x0)
    for i in range(len(x0)):
        up = x0.copy(); up[i] += eps
        dn = x0.copy(); dn[i] -= eps
        grad[i] = (f(up) - f(dn)) / (2 * eps)
    return grad


@pytest.mark.parametrize("loss", [LOGISTIC, HINGE])
def test_linear_gradient_vs_finite_differences(loss):
    rng = np.random.default_rng(7)
    dim = 30
    X = [random_sparse(rng, dim=dim, nnz=6) for _ in range(10)]
    y_pm = np.where(rng.random(10) < 0.5, -1.0, 1.0)
    worst = 0.0
    points = 0
    while points < 20:
        w = rng.standard_normal(dim)
        b = float(rng.standard_normal())
        if loss == HINGE:
            margins = np.array(
                [float(np.dot(w[x.indices], x.weights)) + b for x in X])
            if np.any(np.abs(y_pm * margins - 1.0) <= 1e-3):
                continue  # stay away from the hinge kink
        _, gw, gb = linear_loss_grad(w, b, X, y_pm, loss, l2=0.01)
        num_w = central_diff(
            lambda wv: linear_loss_grad(wv, b, X, y_pm, loss, 0.01)[0], w)
        num_b = central_diff(
            lambda bv: linear_loss_grad(w, float(bv[0]), X, y_pm, loss, 0.01)[0],
            np.array([b]))[0]
        scale = max(np.max(np.abs(num_w)), abs(num_b), 1e-8)
        worst = max(worst,
                    np.max(np.abs(gw - num_w)) / scale,
                    abs(gb - num_b) / scale)
        points += 1
    assert worst < 1e-4


def test_mlp_gradient_vs_finite_differences():
    rng = np.random.default_rng(11)
    dim, hidden = 12, 5
    X = [random_sparse(rng, dim=dim, nnz=4) for _ in range(6)]
    y = (rng.random(6) < 0.5).astype(float)
    worst = 0.0
    for point in range(20):
        w1 = rng.standard_normal((dim, hidden))
        b1 = rng.standard_normal(hidden)
        w2 = rng.standard_normal(hidden)
        b2 = float(rng.standard_normal())
        _, gw1, gb1, gw2, gb2 = mlp_loss_grads(w1, b1, w2, b2, X, y, l2=0.01)

        def f(flat):
            p = 0
            w1f = flat[p:p + dim * hidden].reshape(dim, hidden); p += dim * hidden
            b1f = flat[p:p + hidden]; p += hidden
            w2f = flat[p:p + hidden]; p += hidden
            b2f = float(flat[p])
            return mlp_loss_grads(w1f, b1f, w2f, b2f, X, y, 0.01)[0]

        flat = np.concatenate([w1.ravel(), b1, w2, [b2]])
        num = central_diff(f, flat)
        ana = np.concatenate([gw1.ravel(), gb1, gw2, [gb2]])
        worst = max(worst, np.max(np.abs(ana - num)) / max(np.max(np.abs(num)), 1e-8))
    assert worst < 1e-4


# --- training behaviour ------------------------------------------------

def separable_data(n=40, seed=3):
    rng = np.random.default_rng(seed)
    X, y = [], []
    for i in range(n):
        label = i % 2
        base = 1 if label else 2
        noise = rng.normal(0, 0.1)
        X.append(vec([(base, 1.0 + noise), (5, 0.5)]))
        y.append(label)
    return X, y


@pytest.mark.parametrize("family", ["svm", "logreg", "mlp"])
def test_separable_toy_reaches_perfect_training_accuracy(family):
    X, y = separable_data()
    cfg = TrainConfig(epochs=50, learning_rate=0.5, batch_size=8, l2=0.0,
                      seed=1, hidden_units=8)
    model = make_model(family, cfg).fit(X, y)
    assert np.array_equal(model.predict(X), np.array(y))


def test_mlp_learns_xor():
    X = [vec([]), vec([(1, 1.0)]), vec([(2, 1.0)]), vec([(1, 1.0), (2, 1.0)])]
    y = [0, 1, 1, 0]
    cfg = TrainConfig(epochs=2000, learning_rate=0.5, batch_size=4, l2=0.0,
                      seed=2, hidden_units=8)
    model = MLPClassifier(cfg).fit(X, y)
    assert np.array_equal(model.predict(X), np.array(y))


def test_trainers_are_deterministic():
    X, y = separable_data()
    cfg = TrainConfig(epochs=10, learning_rate=0.2, batch_size=8, seed=5,
                      hidden_units=8)
    for family in ("svm", "logreg", "mlp"):
        a = make_model(family, cfg).fit(X, y)
        b = make_model(family, cfg).fit(X, y)
        np.testing.assert_array_equal(a.predict_proba(X), b.predict_proba(X))
    ma = MultinomialNaiveBayes().fit(*mnb_data())
    mb = MultinomialNaiveBayes().fit(*mnb_data())
    np.testing.assert_array_equal(ma.class_counts_, mb.class_counts_)


def mnb_data():
    rng = np.random.default_rng(0)
    X = [random_sparse(rng, nnz=5, signed=False) for _ in range(10)]
    return X, [i % 2 for i in range(10)]


def test_duplicated_training_set_same_decision_function():
    # with full-batch updates the mean gradient is unchanged by duplication
    X, y = separable_data(n=20)
    cfg = TrainConfig(epochs=15, learning_rate=0.2, batch_size=1000, seed=4)
    single = LinearSGDClassifier(LOGISTIC, cfg).fit(X, y)
    doubled = LinearSGDClassifier(LOGISTIC, cfg).fit(X + X, y + y)
    probes = X[:5]
    np.testing.assert_allclose(single.margins(probes), doubled.margins(probes),
                               atol=1e-6)


def test_logreg_l2_shrinks_weights():
    X, y = separable_data(n=30)
    norms = []
    for l2 in (0.0, 0.01, 0.1):
        cfg = TrainConfig(epochs=40, learning_rate=0.3, batch_size=8, l2=l2, seed=6)
        model = LinearSGDClassifier(LOGISTIC, cfg).fit(X, y)
        norms.append(float(np.linalg.norm(model.w_)))
    assert norms[0] >= norms[1] >= norms[2]


def test_zero_weight_linear_model_scores_half():
    model = LinearSGDClassifier(LOGISTIC, TrainConfig(epochs=0))
    model.dim_ = DIM
    model.w_ = np.zeros(DIM, dtype=np.float32)
    model.b_ = 0.0
    rng = np.random.default_rng(1)
    scores = model.predict_proba([random_sparse(rng) for _ in range(5)])
    np.testing.assert_array_equal(scores, 0.5)


def test_zero_epoch_mlp_scores_near_initial_bias():
    X, y = separable_data(n=10)
    cfg = TrainConfig(epochs=0, hidden_units=8, seed=1)
    model = MLPClassifier(cfg).fit(X, y)
    scores = model.predict_proba(X)
    assert np.all(np.abs(scores - sigmoid(0.0)) < 0.2)


def test_svm_score_rank_equals_margin_rank():
    X, y = separable_data(n=30)
    cfg = TrainConfig(epochs=20, learning_rate=0.3, batch_size=8, seed=9)
    model = LinearSGDClassifier(HINGE, cfg).fit(X, y)
    rng = np.random.default_rng(2)
    probes = [random_sparse(rng) for _ in range(100)]
    margins = model.margins(probes)
    scores = model.predict_proba(probes)
    assert np.array_equal(np.argsort(-margins, kind="stable"),
                          np.argsort(-scores, kind="stable"))


def test_threshold_flip_and_score_range():
    X, y = separable_data()
    cfg = TrainConfig(epochs=10, learning_rate=0.2, batch_size=8, seed=5)
    model = LinearSGDClassifier(LOGISTIC, cfg).fit(X, y)
    scores = model.predict_proba(X)
    assert np.all((scores >= 0) & (scores <= 1))
    scored = model.score_one(X[0])
    assert (scored.label == "travelogue") == (scored.score >= scored.threshold)
    model.threshold = float(scores[0])  # tie classifies positive
    assert model.predict([X[0]])[0] == 1


def test_dimension_mismatch():
    X, y = separable_data()
    cfg = TrainConfig(epochs=2, seed=0)
    model = LinearSGDClassifier(HINGE, cfg).fit(X, y)
    with pytest.raises(DimensionMismatch):
        model.predict_proba([vec([(0, 1.0)], dim=2048)])


def test_mnb_rejects_signed_vector_at_predict():
    model = MultinomialNaiveBayes().fit(*mnb_data())
    with pytest.raises(ProfileMismatch):
        model.predict_proba([vec([(0, -0.5), (3, 1.0)])])


# --- serialization -----------------------------------------------------

@pytest.mark.parametrize("family", ["mnb", "svm", "logreg", "mlp"])
def test_save_load_roundtrip_bit_identical(family, tmp_path):
    cfg = TrainConfig(epochs=5, learning_rate=0.2, batch_size=8, seed=3,
                      hidden_units=8)
    if family == "mnb":
        X, y = mnb_data()
    else:
        X, y = separable_data()
    model = make_model(family, cfg).fit(X, y)
    model.bind_features(FeatureConfig(hash_dim=DIM), "cafe1234cafe1234")
    path = tmp_path / "model.bin"
    save_model(model, path)
    loaded = load_model(path)
    rng = np.random.default_rng(4)
    probes = [random_sparse(rng, signed=family != "mnb") for _ in range(50)]
    np.testing.assert_array_equal(model.predict_proba(probes),
                                  loaded.predict_proba(probes))
    assert loaded.feature_config == model.feature_config
    assert loaded.freq_fingerprint == "cafe1234cafe1234"


def test_truncated_model_file_fails_checksum(tmp_path):
    X, y = separable_data()
    model = LinearSGDClassifier(HINGE, TrainConfig(epochs=1, seed=0)).fit(X, y)
    data = model_to_bytes(model)
    with pytest.raises(ChecksumMismatch):
        model_from_bytes(data[:-10])


def test_unknown_version_rejected():
    X, y = separable_data()
    model = LinearSGDClassifier(HINGE, TrainConfig(epochs=1, seed=0)).fit(X, y)
    data = bytearray(model_to_bytes(model)[:-32])
    struct.pack_into("<H", data, 4, 99)
    data += hashlib.sha256(bytes(data)).digest()
    with pytest.raises(VersionMismatch):
        model_from_bytes(bytes(data))


def test_foreign_hash_function_rejected():
    X, y = separable_data()
    model = LinearSGDClassifier(HINGE, TrainConfig(epochs=1, seed=0)).fit(X, y)
    data = model_to_bytes(model)
    head_len = struct.unpack_from("<I", data, 6)[0]
    header = json.loads(data[10:10 + head_len])
    header["hash_function"] = "md5-32"
    head = json.dumps(header, sort_keys=True).encode()
    body = data[:4] + struct.pack("<HI", 1, len(head)) + head + data[10 + head_len:-32]
    body += hashlib.sha256(body).digest()
    with pytest.raises(ProfileMismatch):
        model_from_bytes(body)


def test_predict_score_helper():
    model = MultinomialNaiveBayes().fit(*mnb_data())
    rng = np.random.default_rng(5)
    scored = predict_score(model, random_sparse(rng, signed=False))
    assert 0.0 <= scored.score <= 1.0
    assert scored.label in ("travelogue", "non_travelogue")
