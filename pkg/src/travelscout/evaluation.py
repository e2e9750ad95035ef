"""Evaluation protocol: stratified 75/25 split, five-fold CV on the
training side, precision/recall/F1, and a random-classification baseline."""

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .corpus import CorpusPartition, DocumentRef
from .errors import LengthMismatch, SingleClassInput, TooFewExamples
from .features import FeatureConfig, FrequencyTable, SparseVector, vectorize_document
from .models import TrainConfig, make_model
from .textprep import tokenize


@dataclass(frozen=True)
class SplitPlan:
    train_ids: tuple[str, ...]
    valid_ids: tuple[str, ...]
    ratio: float
    seed: int


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    confusion: tuple  # (tp, fp, fn, tn)

    def to_json(self) -> dict:
        return {"precision": self.precision, "recall": self.recall,
                "f1": self.f1, "confusion": list(self.confusion)}


@dataclass
class EvaluationReport:
    century: int
    model_family: str
    per_fold: list[Metrics]
    validation: Metrics
    baseline: Metrics
    config_fingerprint: str
    feature_config: dict
    train_config: dict
    eval_settings: dict

    def to_json(self) -> dict:
        return {
            "century": self.century,
            "model_family": self.model_family,
            "per_fold": [m.to_json() for m in self.per_fold],
            "validation": self.validation.to_json(),
            "baseline": self.baseline.to_json(),
            "config_fingerprint": self.config_fingerprint,
            "feature_config": self.feature_config,
            "train_config": self.train_config,
            "eval_settings": self.eval_settings,
        }


def stratified_split(ids_with_labels: Sequence[tuple[str, int]],
                     ratio: float = 0.75, seed: int = 0) -> SplitPlan:
    """Shuffle each class with the seed, then cut at floor(ratio·n) per
    class; the remainder goes to validation."""
    if not 0 < ratio < 1:
        raise ValueError("ratio must be in (0, 1)")
    by_class: dict[int, list[str]] = {}
    for doc_id, label in ids_with_labels:
        by_class.setdefault(label, []).append(doc_id)
    if len(by_class) < 2:
        raise SingleClassInput("need both classes to stratify")
    rng = np.random.RandomState(seed)
    train, valid = [], []
    for label in sorted(by_class):
        ids = by_class[label]
        order = rng.permutation(len(ids))
        cut = int(ratio * len(ids))
        train.extend(ids[i] for i in order[:cut])
        valid.extend(ids[i] for i in order[cut:])
    return SplitPlan(tuple(train), tuple(valid), ratio, seed)


def kfold(ids_with_labels: Sequence[tuple[str, int]], k: int = 5,
          seed: int = 0) -> list[tuple[list[str], list[str]]]:
    """Stratified k folds: shuffle per class, deal round-robin.  Test folds
    are disjoint, differ in size by at most one, and cover the input."""
    if k < 2:
        raise ValueError("k must be >= 2")
    by_class: dict[int, list[str]] = {}
    for doc_id, label in ids_with_labels:
        by_class.setdefault(label, []).append(doc_id)
    for label, ids in by_class.items():
        if len(ids) < k:
            raise TooFewExamples(label, k)
    rng = np.random.RandomState(seed)
    test_folds: list[list[str]] = [[] for _ in range(k)]
    for label in sorted(by_class):
        ids = by_class[label]
        order = rng.permutation(len(ids))
        for slot, i in enumerate(order):
            test_folds[slot % k].append(ids[i])
    all_ids = set(i for i, _ in ids_with_labels)
    return [(sorted(all_ids - set(test)), list(test)) for test in test_folds]


def compute_metrics(y_true, y_pred) -> Metrics:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if len(y_true) != len(y_pred) or len(y_true) == 0:
        raise LengthMismatch(f"{len(y_true)} true vs {len(y_pred)} predicted")
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    tn = int(np.sum((y_true == 0) & (y_pred == 0)))
    # zero-denominator convention: the ratio is 0, not undefined
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(precision, recall, f1, (tp, fp, fn, tn))


def random_baseline(y_true, seed: int = 0, trials: int = 1000) -> Metrics:
    """Mean metrics of uniform coin-flip predictions.

    The aggregate averages per-trial precision/recall/F1 (and confusion
    counts), so the harmonic-mean identity holds per trial, not for the
    averaged summary.
    """
    y_true = np.asarray(y_true)
    rng = np.random.RandomState(seed)
    ps, rs, fs = [], [], []
    conf = np.zeros(4)
    for _ in range(trials):
        preds = rng.randint(0, 2, size=len(y_true))
        m = compute_metrics(y_true, preds)
        ps.append(m.precision)
        rs.append(m.recall)
        fs.append(m.f1)
        conf += np.array(m.confusion)
    conf /= trials
    return Metrics(float(np.mean(ps)), float(np.mean(rs)), float(np.mean(fs)),
                   tuple(round(c, 6) for c in conf))


def config_fingerprint(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def profile_for_family(cfg: FeatureConfig, family: str) -> FeatureConfig:
    """MNB needs non-negative counts; the other families keep the signed
    normalized profile."""
    if family == "mnb":
        return replace(cfg, signed=False, normalize="none", weighting="count")
    return cfg


def vectorize_refs(refs: Sequence[DocumentRef], freq: FrequencyTable,
                   cfg: FeatureConfig, min_count: int = 2) -> dict[str, SparseVector]:
    out = {}
    for ref in refs:
        text = Path(ref.text_path).read_text(encoding="utf-8")
        out[ref.id] = vectorize_document(text, freq, cfg, min_count)
    return out


def build_reference_frequency(partition: CorpusPartition,
                              scope: str = "all") -> FrequencyTable:
    """Min-frequency reference corpus.  Default counts over everything in
    the partition (labeled and candidates); scope="labeled" restricts to
    ground truth for leakage-sensitive experiments."""
    refs = list(partition.positives) + list(partition.negatives)
    if scope == "all":
        refs += list(partition.candidates)
    table = FrequencyTable()
    for ref in refs:
        table.add(tokenize(Path(ref.text_path).read_text(encoding="utf-8")))
    return table


def run_experiment(partition: CorpusPartition, feature_cfg: FeatureConfig,
                   train_cfg: TrainConfig, model_family: str, *,
                   freq: Optional[FrequencyTable] = None,
                   vectors: Optional[dict[str, SparseVector]] = None,
                   ratio: float = 0.75, k: int = 5, seed: int = 0,
                   baseline_trials: int = 1000, alpha: float = 1.0,
                   min_count: int = 2):
    """The full protocol: split, CV on the training side, retrain on the
    whole training split, score the held-out validation set, and attach the
    random baseline.  Returns (EvaluationReport, final model)."""
    cfg = profile_for_family(feature_cfg, model_family)
    if freq is None:
        freq = build_reference_frequency(partition)
    labeled = [(ref, 1) for ref in partition.positives] + \
              [(ref, 0) for ref in partition.negatives]
    if vectors is None:
        vectors = vectorize_refs([r for r, _ in labeled], freq, cfg, min_count)
    labels = {ref.id: lab for ref, lab in labeled}

    plan = stratified_split([(ref.id, lab) for ref, lab in labeled], ratio, seed)
    train_pairs = [(i, labels[i]) for i in plan.train_ids]

    def fit(ids):
        model = make_model(model_family, train_cfg, alpha=alpha)
        X = [vectors[i] for i in ids]
        y = [labels[i] for i in ids]
        return model.fit(X, y)

    def score(model, ids) -> Metrics:
        y_true = [labels[i] for i in ids]
        y_pred = model.predict([vectors[i] for i in ids])
        return compute_metrics(y_true, y_pred)

    per_fold = []
    for fold_train, fold_test in kfold(train_pairs, k, seed + 1):
        per_fold.append(score(fit(fold_train), fold_test))

    final_model = fit(list(plan.train_ids))
    final_model.bind_features(cfg, freq.fingerprint())
    validation = score(final_model, list(plan.valid_ids))
    baseline = random_baseline([labels[i] for i in plan.valid_ids],
                               seed=seed + 2, trials=baseline_trials)

    settings = {"ratio": ratio, "k": k, "seed": seed,
                "baseline_trials": baseline_trials, "alpha": alpha,
                "min_count": min_count}
    fingerprint = config_fingerprint({
        "family": model_family, "century": partition.century,
        "features": cfg.to_dict(), "train": train_cfg.to_dict(), **settings})
    report = EvaluationReport(
        century=partition.century, model_family=model_family,
        per_fold=per_fold, validation=validation, baseline=baseline,
        config_fingerprint=fingerprint, feature_config=cfg.to_dict(),
        train_config=train_cfg.to_dict(), eval_settings=settings)
    return report, final_model
