"""Ground-truth efficiency experiment: sweep training-set sizes with
repeated randomized sampling, test on the remaining ground truth."""

import csv
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .corpus import CorpusPartition
from .errors import SizeTooLarge
from .evaluation import (build_reference_frequency, compute_metrics,
                         profile_for_family, vectorize_refs)
from .features import FeatureConfig, FrequencyTable, SparseVector
from .models import TrainConfig, make_model

DEFAULT_SIZES = (5, 10, 15, 20, 25, 30, 50)
EXTENDED_SIZES = DEFAULT_SIZES + (100,)


@dataclass(frozen=True)
class CurvePoint:
    per_class_size: int
    repeats: int
    f1_values: tuple[float, ...]
    mean_f1: float
    variance: float  # sample variance (ddof=1)

    def to_json(self) -> dict:
        return {"per_class_size": self.per_class_size, "repeats": self.repeats,
                "f1_values": list(self.f1_values), "mean_f1": self.mean_f1,
                "variance": self.variance}


def learning_curve(partition: CorpusPartition, sizes: Sequence[int] = DEFAULT_SIZES,
                   repeats: int = 5, model_family: str = "mlp",
                   feature_cfg: Optional[FeatureConfig] = None,
                   train_cfg: Optional[TrainConfig] = None, seed: int = 0, *,
                   freq: Optional[FrequencyTable] = None, alpha: float = 1.0,
                   min_count: int = 2,
                   vectors: Optional[dict[str, SparseVector]] = None,
                   ) -> list[CurvePoint]:
    """For each size s: draw s positives + s negatives (seeded, without
    replacement), train, evaluate on every remaining ground-truth document;
    repeat with fresh samples and aggregate.

    Each (size, repeat) cell derives its own seed from (seed, size, repeat),
    so cells are reproducible independently of execution order.
    """
    feature_cfg = profile_for_family(feature_cfg or FeatureConfig(), model_family)
    train_cfg = train_cfg or TrainConfig()
    pos_ids = [r.id for r in partition.positives]
    neg_ids = [r.id for r in partition.negatives]
    max_per_class = min(len(pos_ids), len(neg_ids))
    for s in sizes:
        if s >= max_per_class:
            raise SizeTooLarge(s)
    if freq is None:
        freq = build_reference_frequency(partition)
    if vectors is None:
        vectors = vectorize_refs(
            list(partition.positives) + list(partition.negatives),
            freq, feature_cfg, min_count)
    labels = {i: 1 for i in pos_ids}
    labels.update({i: 0 for i in neg_ids})
    all_ids = pos_ids + neg_ids

    points = []
    for s in sizes:
        f1_values = []
        for rep in range(repeats):
            rng = np.random.default_rng(np.random.SeedSequence([seed, s, rep]))
            sample = [pos_ids[i] for i in rng.choice(len(pos_ids), s, replace=False)]
            sample += [neg_ids[i] for i in rng.choice(len(neg_ids), s, replace=False)]
            rest = [i for i in all_ids if i not in set(sample)]
            model = make_model(model_family, train_cfg, alpha=alpha)
            model.fit([vectors[i] for i in sample], [labels[i] for i in sample])
            preds = model.predict([vectors[i] for i in rest])
            f1_values.append(compute_metrics([labels[i] for i in rest], preds).f1)
        arr = np.array(f1_values)
        variance = float(arr.var(ddof=1)) if len(arr) > 1 else 0.0
        points.append(CurvePoint(s, repeats, tuple(f1_values),
                                 float(arr.mean()), variance))
    return points


def save_curve_csv(points: Sequence[CurvePoint], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["size", "repeat", "f1"])
        for p in points:
            for rep, f1 in enumerate(p.f1_values):
                writer.writerow([p.per_class_size, rep, f"{f1:.6f}"])


def save_curve_json(points: Sequence[CurvePoint], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"points": [p.to_json() for p in points],
                   "variance_definition": "sample (ddof=1)"}, fh,
                  indent=2, sort_keys=True)
        fh.write("\n")


def plot_curve_svg(points: Sequence[CurvePoint], path, title="F1 vs ground-truth size") -> None:
    """Mean ± variance curve rendered as SVG."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [p.per_class_size for p in points]
    means = [p.mean_f1 for p in points]
    var = [p.variance for p in points]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.errorbar(xs, means, yerr=var, fmt="o-", capsize=3, label="mean F1")
    ax.set_xlabel("examples per class")
    ax.set_ylabel("F1")
    ax.set_ylim(0, 1.05)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
