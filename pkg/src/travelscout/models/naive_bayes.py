"""Multinomial naive Bayes with Laplace smoothing on hashed count vectors."""

import math
from typing import Sequence

import numpy as np

from ..features import SparseVector
from .base import ClassifierMixin, check_training_input, require_nonnegative


class MultinomialNaiveBayes(ClassifierMixin):
    family = "mnb"

    def __init__(self, alpha: float = 1.0):
        if alpha <= 0:
            raise ValueError("alpha must be > 0")
        self.alpha = alpha
        self.class_counts_ = None   # (2, dim) summed feature counts
        self.class_totals_ = None   # (2,)
        self.log_prior_ = None      # (2,)
        self.dim_ = 0

    def get_params(self) -> dict:
        return {"alpha": self.alpha}

    def fit(self, X: Sequence[SparseVector], y) -> "MultinomialNaiveBayes":
        y = check_training_input(X, y)
        require_nonnegative(X, signed_profile_hint=False)
        self.dim_ = X[0].dim
        counts = np.zeros((2, self.dim_), dtype=np.float64)
        for x, label in zip(X, y):
            counts[label, x.indices] += x.weights
        self.class_counts_ = counts
        self.class_totals_ = counts.sum(axis=1)
        n = len(y)
        self.log_prior_ = np.array([
            math.log(np.sum(y == 0) / n),
            math.log(np.sum(y == 1) / n),
        ])
        return self

    def log_posteriors(self, x: SparseVector) -> np.ndarray:
        """Unnormalized log posterior per class.

        log p(c|x) ∝ log p(c) + Σ_j x_j · log((α + n_cj) / (α·dim + N_c))
        """
        self._check_vector(x)
        require_nonnegative([x])
        out = np.empty(2)
        for c in range(2):
            denom = math.log(self.alpha * self.dim_ + self.class_totals_[c])
            num = np.log(self.alpha + self.class_counts_[c, x.indices])
            out[c] = self.log_prior_[c] + float(np.dot(x.weights, num)) \
                - denom * float(np.sum(x.weights))
        return out

    def decision_scores(self, X: Sequence[SparseVector]) -> np.ndarray:
        scores = np.empty(len(X))
        for i, x in enumerate(X):
            lp = self.log_posteriors(x)
            m = lp.max()
            probs = np.exp(lp - m)
            scores[i] = probs[1] / probs.sum()
        return scores
