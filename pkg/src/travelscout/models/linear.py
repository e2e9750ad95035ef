"""Linear classifiers (hinge and logistic loss) trained by mini-batch SGD."""

from typing import Sequence

import numpy as np

from ..errors import DivergenceDetected
from ..features import SparseVector
from .base import ClassifierMixin, TrainConfig, check_training_input, sigmoid

HINGE = "hinge"
LOGISTIC = "logistic"


def linear_loss_grad(w: np.ndarray, b: float, X: Sequence[SparseVector],
                     y_pm: np.ndarray, loss: str, l2: float):
    """Objective and gradients on a batch.

    Objective: (1/n) Σ loss(y_i, w·x_i + b) + l2·‖w‖², labels in {-1,+1}.
    The same code path serves training and the finite-difference checks.
    """
    n = len(X)
    margins = np.array([float(np.dot(w[x.indices], x.weights)) + b for x in X])
    z = y_pm * margins
    gw = np.zeros_like(w)
    if loss == HINGE:
        total = float(np.sum(np.maximum(0.0, 1.0 - z)))
        active = z < 1.0
        for x, yi, act in zip(X, y_pm, active):
            if act:
                gw[x.indices] -= yi * x.weights
        gb = float(-np.sum(y_pm[active]))
    elif loss == LOGISTIC:
        # log(1 + exp(-z)) computed stably
        total = float(np.sum(np.logaddexp(0.0, -z)))
        coef = -y_pm * sigmoid(-z)
        for x, c in zip(X, coef):
            gw[x.indices] += c * x.weights
        gb = float(np.sum(coef))
    else:
        raise ValueError(f"unknown loss {loss!r}")
    obj = total / n + l2 * float(np.dot(w, w))
    gw = gw / n + 2.0 * l2 * w
    return obj, gw, gb / n


class LinearSGDClassifier(ClassifierMixin):
    """SVM (hinge) or logistic regression (logistic), chosen by ``loss``."""

    def __init__(self, loss: str = HINGE, config: TrainConfig | None = None):
        if loss not in (HINGE, LOGISTIC):
            raise ValueError(f"loss must be {HINGE!r} or {LOGISTIC!r}")
        self.loss = loss
        self.config = config or TrainConfig()
        self.w_ = None
        self.b_ = 0.0
        self.dim_ = 0

    @property
    def family(self) -> str:
        return "svm" if self.loss == HINGE else "logreg"

    def get_params(self) -> dict:
        return {"loss": self.loss, **self.config.to_dict()}

    def fit(self, X: Sequence[SparseVector], y) -> "LinearSGDClassifier":
        y = check_training_input(X, y)
        y_pm = np.where(y == 1, 1.0, -1.0)
        cfg = self.config
        self.dim_ = X[0].dim
        w = np.zeros(self.dim_, dtype=np.float64)
        b = 0.0
        rng = np.random.RandomState(cfg.seed)
        n = len(X)
        for _ in range(cfg.epochs):
            order = rng.permutation(n)
            for start in range(0, n, cfg.batch_size):
                batch = order[start:start + cfg.batch_size]
                obj, gw, gb = linear_loss_grad(
                    w, b, [X[i] for i in batch], y_pm[batch], self.loss, cfg.l2)
                if not np.isfinite(obj):
                    raise DivergenceDetected(f"loss became {obj}")
                w -= cfg.learning_rate * gw
                b -= cfg.learning_rate * gb
        # float32 is the serialized parameter format; quantize now so that
        # predictions before and after a save/load round trip are identical.
        self.w_ = w.astype(np.float32)
        self.b_ = float(np.float32(b))
        return self

    def margin(self, x: SparseVector) -> float:
        self._check_vector(x)
        return float(np.dot(self.w_[x.indices].astype(np.float64), x.weights)) + self.b_

    def margins(self, X: Sequence[SparseVector]) -> np.ndarray:
        return np.array([self.margin(x) for x in X])

    def decision_scores(self, X: Sequence[SparseVector]) -> np.ndarray:
        # Hinge margins are squashed through a fixed sigmoid: uncalibrated,
        # but strictly monotone in the margin, so rankings are unaffected.
        return sigmoid(self.margins(X))
