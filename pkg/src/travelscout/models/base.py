"""Shared classifier surface: train config, validation helpers, scoring."""

from dataclasses import dataclass, asdict
from typing import Optional, Sequence

import numpy as np

from ..corpus import TRAVELOGUE, NON_TRAVELOGUE
from ..errors import (DimensionMismatch, NegativeFeature, ProfileMismatch,
                      SingleClassInput)
from ..features import FeatureConfig, SparseVector

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    learning_rate: float = 0.1
    batch_size: int = 32
    l2: float = 1e-4
    seed: int = 0
    hidden_units: int = 256
    early_stop_patience: Optional[int] = None

    def __post_init__(self):
        if self.epochs < 0 or self.batch_size < 1:
            raise ValueError("epochs must be >= 0 and batch_size >= 1")
        if self.learning_rate <= 0 or self.l2 < 0:
            raise ValueError("learning_rate must be > 0 and l2 >= 0")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)


@dataclass(frozen=True)
class ScoredLabel:
    score: float
    label: str
    threshold: float = DEFAULT_THRESHOLD


def check_training_input(X: Sequence[SparseVector], y) -> np.ndarray:
    """Validate a (vectors, labels) pair and return y as an int array in {0,1}."""
    y = np.asarray(y, dtype=np.int64)
    if len(X) != len(y):
        raise ValueError(f"{len(X)} vectors but {len(y)} labels")
    if len(set(y.tolist())) < 2:
        raise SingleClassInput("training data must contain both classes")
    if not set(y.tolist()) <= {0, 1}:
        raise ValueError("labels must be 0 (negative) or 1 (travelogue)")
    dims = {x.dim for x in X}
    if len(dims) != 1:
        raise DimensionMismatch(X[0].dim, dims)
    return y


class ClassifierMixin:
    """fit/predict surface shared by all four model families.

    Subclasses implement ``decision_scores`` returning the positive-class
    probability for each vector; everything else derives from it.
    """

    dim_: int = 0
    feature_config: Optional[FeatureConfig] = None
    freq_fingerprint: str = ""
    threshold: float = DEFAULT_THRESHOLD

    def bind_features(self, feature_config: FeatureConfig, freq_fingerprint: str):
        """Pin the preprocessing that produced this model's training vectors."""
        self.feature_config = feature_config
        self.freq_fingerprint = freq_fingerprint
        return self

    def decision_scores(self, X: Sequence[SparseVector]) -> np.ndarray:
        raise NotImplementedError

    def _check_vector(self, x: SparseVector) -> None:
        if x.dim != self.dim_:
            raise DimensionMismatch(self.dim_, x.dim)

    def predict_proba(self, X: Sequence[SparseVector]) -> np.ndarray:
        for x in X:
            self._check_vector(x)
        return self.decision_scores(X)

    def predict(self, X: Sequence[SparseVector]) -> np.ndarray:
        # Tie at exactly the threshold classifies positive.
        return (self.predict_proba(X) >= self.threshold).astype(np.int64)

    def score_one(self, x: SparseVector) -> ScoredLabel:
        score = float(self.predict_proba([x])[0])
        label = TRAVELOGUE if score >= self.threshold else NON_TRAVELOGUE
        return ScoredLabel(score=score, label=label, threshold=self.threshold)


def predict_score(model: ClassifierMixin, x: SparseVector) -> ScoredLabel:
    return model.score_one(x)


def require_nonnegative(X: Sequence[SparseVector], signed_profile_hint=True) -> None:
    """MNB guard: signed-profile vectors carry negative weights and must not
    reach a multinomial likelihood."""
    for x in X:
        if len(x.weights) and float(x.weights.min()) < 0:
            if signed_profile_hint:
                raise ProfileMismatch(
                    "vector has negative weights; multinomial NB needs the "
                    "unsigned count profile")
            raise NegativeFeature("negative feature weight")


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out
