from .base import (ClassifierMixin, ScoredLabel, TrainConfig,
                   check_training_input, predict_score, sigmoid)
from .io import (load_model, model_fingerprint, model_from_bytes,
                 model_to_bytes, save_model)
from .linear import HINGE, LOGISTIC, LinearSGDClassifier, linear_loss_grad
from .mlp import MLPClassifier, init_params, mlp_loss_grads
from .naive_bayes import MultinomialNaiveBayes

FAMILIES = ("mnb", "svm", "logreg", "mlp")


def make_model(family: str, train_config: TrainConfig | None = None,
               alpha: float = 1.0):
    """Instantiate one of the four classifier families by name."""
    if family == "mnb":
        return MultinomialNaiveBayes(alpha=alpha)
    if family == "svm":
        return LinearSGDClassifier(loss=HINGE, config=train_config)
    if family == "logreg":
        return LinearSGDClassifier(loss=LOGISTIC, config=train_config)
    if family == "mlp":
        return MLPClassifier(config=train_config)
    raise ValueError(f"unknown model family {family!r}")


__all__ = [
    "ClassifierMixin", "ScoredLabel", "TrainConfig", "check_training_input",
    "predict_score", "sigmoid", "load_model", "save_model", "model_to_bytes",
    "model_from_bytes", "model_fingerprint", "LinearSGDClassifier",
    "MLPClassifier", "MultinomialNaiveBayes", "HINGE", "LOGISTIC",
    "linear_loss_grad", "mlp_loss_grads", "init_params", "FAMILIES",
    "make_model",
]
