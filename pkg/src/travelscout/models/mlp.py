"""One-hidden-layer perceptron: ReLU hidden units, sigmoid output, binary
cross-entropy, mini-batch SGD with a sparse-aware first layer."""

from typing import Sequence

import numpy as np

from ..errors import DivergenceDetected
from ..features import SparseVector
from .base import ClassifierMixin, TrainConfig, check_training_input, sigmoid


def init_params(dim: int, hidden: int, seed: int):
    """Uniform init scaled by fan-in; biases start at zero."""
    rng = np.random.RandomState(seed)
    bound1 = 1.0 / np.sqrt(dim)
    bound2 = 1.0 / np.sqrt(hidden)
    w1 = rng.uniform(-bound1, bound1, size=(dim, hidden))
    b1 = np.zeros(hidden)
    w2 = rng.uniform(-bound2, bound2, size=hidden)
    b2 = 0.0
    return w1, b1, w2, b2


def _hidden_preact(w1, b1, X: Sequence[SparseVector]) -> np.ndarray:
    z1 = np.empty((len(X), w1.shape[1]))
    for i, x in enumerate(X):
        z1[i] = x.weights @ w1[x.indices] + b1
    return z1


def mlp_loss_grads(w1, b1, w2, b2, X: Sequence[SparseVector], y: np.ndarray,
                   l2: float):
    """Mean binary cross-entropy + l2·(‖W1‖² + ‖W2‖²) and its gradients.

    Returns (objective, gw1, gb1, gw2, gb2) with gw1 dense; training applies
    the same gradient with the dense l2 term folded into a scaling step.
    """
    n = len(X)
    z1 = _hidden_preact(w1, b1, X)
    a1 = np.maximum(z1, 0.0)
    z2 = a1 @ w2 + b2
    # BCE via softplus: log(1+e^{z}) - y·z
    total = float(np.sum(np.logaddexp(0.0, z2) - y * z2))
    p = sigmoid(z2)
    d2 = (p - y) / n                      # (n,)
    gw2 = a1.T @ d2 + 2.0 * l2 * w2
    gb2 = float(np.sum(d2))
    d1 = np.outer(d2, w2) * (z1 > 0)      # (n, hidden)
    gw1 = np.zeros_like(w1)
    for x, row in zip(X, d1):
        gw1[x.indices] += np.outer(x.weights, row)
    gw1 += 2.0 * l2 * w1
    gb1 = d1.sum(axis=0)
    obj = total / n + l2 * (float(np.sum(w1 * w1)) + float(np.dot(w2, w2)))
    return obj, gw1, gb1, gw2, gb2


class MLPClassifier(ClassifierMixin):
    family = "mlp"

    def __init__(self, config: TrainConfig | None = None):
        self.config = config or TrainConfig()
        self.w1_ = None
        self.b1_ = None
        self.w2_ = None
        self.b2_ = 0.0
        self.dim_ = 0

    def get_params(self) -> dict:
        return self.config.to_dict()

    def fit(self, X: Sequence[SparseVector], y) -> "MLPClassifier":
        y = check_training_input(X, y)
        cfg = self.config
        self.dim_ = X[0].dim
        w1, b1, w2, b2 = init_params(self.dim_, cfg.hidden_units, cfg.seed)
        y_f = y.astype(np.float64)
        rng = np.random.RandomState(cfg.seed + 1)
        n = len(X)
        decay = 1.0 - 2.0 * cfg.learning_rate * cfg.l2
        for _ in range(cfg.epochs):
            order = rng.permutation(n)
            for start in range(0, n, cfg.batch_size):
                batch = [X[i] for i in order[start:start + cfg.batch_size]]
                yb = y_f[order[start:start + cfg.batch_size]]
                nb = len(batch)
                z1 = _hidden_preact(w1, b1, batch)
                a1 = np.maximum(z1, 0.0)
                z2 = a1 @ w2 + b2
                total = float(np.sum(np.logaddexp(0.0, z2) - yb * z2))
                if not np.isfinite(total):
                    raise DivergenceDetected(f"loss became {total}")
                d2 = (sigmoid(z2) - yb) / nb
                d1 = np.outer(d2, w2) * (z1 > 0)
                # l2 decay first, then the data part of the gradient: together
                # they equal one step along the full regularized gradient.
                if cfg.l2 > 0:
                    w1 *= decay
                    w2 *= decay
                w2 -= cfg.learning_rate * (a1.T @ d2)
                b2 -= cfg.learning_rate * float(np.sum(d2))
                b1 -= cfg.learning_rate * d1.sum(axis=0)
                lr = cfg.learning_rate
                for x, row in zip(batch, d1):
                    w1[x.indices] -= lr * np.outer(x.weights, row)
        self.w1_ = w1.astype(np.float32)
        self.b1_ = b1.astype(np.float32)
        self.w2_ = w2.astype(np.float32)
        self.b2_ = float(np.float32(b2))
        return self

    def decision_scores(self, X: Sequence[SparseVector]) -> np.ndarray:
        w1 = self.w1_.astype(np.float64)
        b1 = self.b1_.astype(np.float64)
        w2 = self.w2_.astype(np.float64)
        z1 = _hidden_preact(w1, b1, X)
        a1 = np.maximum(z1, 0.0)
        return sigmoid(a1 @ w2 + self.b2_)
