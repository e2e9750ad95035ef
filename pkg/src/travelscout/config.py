"""Declarative run configuration: one YAML file drives every pipeline stage."""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .errors import ConfigError
from .evaluation import config_fingerprint
from .features import FeatureConfig
from .models import FAMILIES, TrainConfig
from .synth import SynthConfig

RUN_ROOT_ENV = "TRAVELSCOUT_RUN_ROOT"

_REQUIRED_SEEDS = (("eval", "seed"), ("curve", "seed"), ("train", "seed"))


@dataclass
class RunConfig:
    raw: dict
    base_dir: Path
    centuries: list[int]
    manifests: dict[int, Path]
    features: FeatureConfig
    min_count: int
    freq_scope: str
    families: list[str]
    train_cfgs: dict[str, TrainConfig]
    mnb_alpha: float
    eval_settings: dict
    curve_settings: dict
    discover_settings: dict
    service_settings: dict
    synth: Optional[SynthConfig]
    run_root: Path

    def fingerprint(self) -> str:
        """Identity of a run: every knob that can influence artifacts."""
        payload = {
            "centuries": self.centuries,
            "manifests": {str(c): str(p) for c, p in self.manifests.items()},
            "features": self.features.to_dict(),
            "min_count": self.min_count,
            "freq_scope": self.freq_scope,
            "families": self.families,
            "train": {f: cfg.to_dict() for f, cfg in self.train_cfgs.items()},
            "mnb_alpha": self.mnb_alpha,
            "eval": self.eval_settings,
            "curve": self.curve_settings,
            "discover": self.discover_settings,
        }
        return config_fingerprint(payload)[:12]

    def run_dir(self) -> Path:
        return self.run_root / self.fingerprint()


def _get(tree: dict, *keys, default=None):
    node: Any = tree
    for key in keys:
        if not isinstance(node, dict) or key not in node:
            return default
        node = node[key]
    return node


def apply_overrides(tree: dict, overrides: list[str]) -> dict:
    """Apply ``a.b.c=value`` overrides; values parse as YAML scalars."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        dotted, value = item.split("=", 1)
        keys = dotted.split(".")
        node = tree
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot override through scalar at {key!r}")
        node[keys[-1]] = yaml.safe_load(value)
    return tree


def load_config(path, overrides: list[str] | None = None,
                require_paths: bool = True) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        tree = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if overrides:
        tree = apply_overrides(tree, list(overrides))
    return parse_config(tree, base_dir=path.parent, require_paths=require_paths)


def parse_config(tree: dict, base_dir: Path, require_paths: bool = True) -> RunConfig:
    if not isinstance(tree, dict):
        raise ConfigError("config root must be a mapping")

    for section, key in _REQUIRED_SEEDS:
        if _get(tree, section, key) is None:
            raise ConfigError(
                f"{section}.{key} must be set explicitly (no implicit seeds)")

    def resolve(p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else (base_dir / p)

    manifests_raw = _get(tree, "manifests", default={}) or {}
    manifests = {int(c): resolve(p) for c, p in manifests_raw.items()}
    centuries = tree.get("centuries") or sorted(manifests)
    centuries = [int(c) for c in centuries]
    for c in centuries:
        if c not in manifests:
            raise ConfigError(f"century {c} listed but no manifest configured")

    feat_tree = dict(_get(tree, "features", default={}) or {})
    min_count = int(feat_tree.pop("min_count", 2))
    try:
        features = FeatureConfig(**feat_tree)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad features section: {exc}") from exc

    train_tree = dict(_get(tree, "train", default={}) or {})
    mnb_alpha = float(_get(train_tree, "mnb", "alpha", default=1.0))
    families = train_tree.pop("families", list(FAMILIES))
    for fam in families:
        if fam not in FAMILIES:
            raise ConfigError(f"unknown model family {fam!r}")
    base_train = {k: v for k, v in train_tree.items()
                  if k not in ("families", "mnb") and not isinstance(v, dict)}
    train_cfgs = {}
    for fam in FAMILIES:
        merged = dict(base_train)
        merged.update(train_tree.get(fam, {}) if isinstance(train_tree.get(fam), dict) else {})
        merged.pop("alpha", None)
        try:
            train_cfgs[fam] = TrainConfig(**merged)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad train config for {fam}: {exc}") from exc

    eval_tree = _get(tree, "eval", default={}) or {}
    eval_settings = {
        "ratio": float(eval_tree.get("ratio", 0.75)),
        "k": int(eval_tree.get("k", 5)),
        "seed": int(eval_tree["seed"]),
        "baseline_trials": int(eval_tree.get("baseline_trials", 1000)),
    }

    curve_tree = _get(tree, "curve", default={}) or {}
    sizes = curve_tree.get("sizes")
    if sizes is None:
        sizes = [5, 10, 15, 20, 25, 30, 50]
        if curve_tree.get("extended"):
            sizes.append(100)
    curve_settings = {
        "sizes": [int(s) for s in sizes],
        "repeats": int(curve_tree.get("repeats", 5)),
        "seed": int(curve_tree["seed"]),
        "model_family": curve_tree.get("model_family", "mlp"),
    }

    discover_tree = _get(tree, "discover", default={}) or {}
    discover_settings = {
        "top_n": int(discover_tree.get("top_n", 200)),
        "model_family": discover_tree.get("model_family", "mlp"),
        "jobs": int(discover_tree.get("jobs", 1)),
    }

    service_tree = _get(tree, "service", default={}) or {}
    service_settings = {
        "host": service_tree.get("host", "127.0.0.1"),
        "port": int(service_tree.get("port", 8765)),
        "annotation_log": service_tree.get("annotation_log", "annotations.jsonl"),
        "excerpt_chars": int(service_tree.get("excerpt_chars", 4000)),
        "round": int(service_tree.get("round", 0)),
        "ui_dir": service_tree.get("ui_dir"),
    }

    synth_tree = _get(tree, "synth")
    synth = SynthConfig(**synth_tree) if synth_tree else None

    run_root = os.environ.get(RUN_ROOT_ENV) or tree.get("run_root", "runs")

    cfg = RunConfig(
        raw=tree, base_dir=base_dir, centuries=centuries, manifests=manifests,
        features=features, min_count=min_count,
        freq_scope=tree.get("freq_scope", "all"), families=list(families),
        train_cfgs=train_cfgs, mnb_alpha=mnb_alpha,
        eval_settings=eval_settings, curve_settings=curve_settings,
        discover_settings=discover_settings, service_settings=service_settings,
        synth=synth, run_root=resolve(run_root))

    if require_paths:
        for century, manifest in cfg.manifests.items():
            if not manifest.exists():
                raise ConfigError(
                    f"manifest for century {century} not found: {manifest}")
    return cfg
