"""Command-line entry point: one subcommand per pipeline stage, all driven
by a single YAML config file.  Artifacts land in a run directory named by
the config fingerprint, so fingerprint-equal configs reuse (and reproduce,
byte for byte) the same outputs."""

import argparse
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .config import RunConfig, load_config
from .curve import learning_curve, plot_curve_svg, save_curve_csv, save_curve_json
from .discover import export_queue, score_candidates
from .errors import ConfigError, MissingArtifact, TravelscoutError
from .evaluation import (build_reference_frequency, profile_for_family,
                         run_experiment, vectorize_refs)
from .models import load_model, make_model, save_model
from .synth import SynthConfig, generate_corpus
from .textprep import FrequencyTable

_EXIT_CODES = {ConfigError: 2, MissingArtifact: 3}


def _freq_path(run_dir: Path, century: int) -> Path:
    return run_dir / f"freq_{century}.tsv"


def _model_path(run_dir: Path, century: int, family: str) -> Path:
    return run_dir / f"model_{century}_{family}.bin"


def _report_path(run_dir: Path, century: int, family: str) -> Path:
    return run_dir / f"report_{century}_{family}.json"


def _queue_path(run_dir: Path, century: int) -> Path:
    return run_dir / f"queue_{century}.csv"


def _load_freq(run_dir: Path, century: int) -> FrequencyTable:
    path = _freq_path(run_dir, century)
    if not path.exists():
        raise MissingArtifact("prep")
    return FrequencyTable.load(path)


def _partition(cfg: RunConfig, century: int):
    refs = corpus_mod.load_manifest(cfg.manifests[century])
    return corpus_mod.partition(refs, century)


def _labeled_vectors(cfg: RunConfig, part, freq, family: str):
    profile = profile_for_family(cfg.features, family)
    refs = list(part.positives) + list(part.negatives)
    return vectorize_refs(refs, freq, profile, cfg.min_count), profile


def _summary(stage: str, run_dir, artifacts) -> None:
    print(json.dumps({"stage": stage, "ok": True, "run_dir": str(run_dir),
                      "artifacts": sorted(str(a) for a in artifacts)},
                     sort_keys=True))


def cmd_prep(cfg: RunConfig) -> None:
    run_dir = cfg.run_dir()
    run_dir.mkdir(parents=True, exist_ok=True)
    artifacts = []
    for century in cfg.centuries:
        part = _partition(cfg, century)
        freq = build_reference_frequency(part, scope=cfg.freq_scope)
        fpath = _freq_path(run_dir, century)
        freq.save(fpath)
        stats = {
            "century": century,
            "positives": len(part.positives),
            "negatives": len(part.negatives),
            "candidates": len(part.candidates),
            "total_tokens": freq.total_tokens,
            "average_tokens": round(freq.total_tokens / freq.doc_count)
            if freq.doc_count else 0,
            "freq_fingerprint": freq.fingerprint(),
            "config_fingerprint": cfg.fingerprint(),
        }
        spath = run_dir / f"stats_{century}.json"
        spath.write_text(json.dumps(stats, indent=2, sort_keys=True) + "\n")
        artifacts += [fpath, spath]
    _summary("prep", run_dir, artifacts)


def cmd_train(cfg: RunConfig) -> None:
    run_dir = cfg.run_dir()
    artifacts = []
    for century in cfg.centuries:
        part = _partition(cfg, century)
        freq = _load_freq(run_dir, century)
        labels = {r.id: 1 for r in part.positives}
        labels.update({r.id: 0 for r in part.negatives})
        for family in cfg.families:
            vectors, profile = _labeled_vectors(cfg, part, freq, family)
            model = make_model(family, cfg.train_cfgs[family], alpha=cfg.mnb_alpha)
            ids = sorted(vectors)
            model.fit([vectors[i] for i in ids], [labels[i] for i in ids])
            model.bind_features(profile, freq.fingerprint())
            path = _model_path(run_dir, century, family)
            save_model(model, path)
            artifacts.append(path)
    _summary("train", run_dir, artifacts)


def cmd_eval(cfg: RunConfig) -> None:
    run_dir = cfg.run_dir()
    artifacts = []
    for century in cfg.centuries:
        part = _partition(cfg, century)
        freq = _load_freq(run_dir, century)
        for family in cfg.families:
            vectors, _ = _labeled_vectors(cfg, part, freq, family)
            report, _model = run_experiment(
                part, cfg.features, cfg.train_cfgs[family], family,
                freq=freq, vectors=vectors, alpha=cfg.mnb_alpha,
                min_count=cfg.min_count, **cfg.eval_settings)
            path = _report_path(run_dir, century, family)
            path.write_text(json.dumps(report.to_json(), indent=2,
                                       sort_keys=True) + "\n")
            artifacts.append(path)
    _summary("eval", run_dir, artifacts)


def cmd_curve(cfg: RunConfig) -> None:
    run_dir = cfg.run_dir()
    settings = cfg.curve_settings
    artifacts = []
    for century in cfg.centuries:
        part = _partition(cfg, century)
        freq = _load_freq(run_dir, century)
        family = settings["model_family"]
        points = learning_curve(
            part, sizes=settings["sizes"], repeats=settings["repeats"],
            model_family=family, feature_cfg=cfg.features,
            train_cfg=cfg.train_cfgs[family], seed=settings["seed"],
            freq=freq, alpha=cfg.mnb_alpha, min_count=cfg.min_count)
        base = run_dir / f"curve_{century}"
        save_curve_csv(points, base.with_suffix(".csv"))
        save_curve_json(points, base.with_suffix(".json"))
        plot_curve_svg(points, base.with_suffix(".svg"),
                       title=f"{family} F1 vs ground-truth size, {century}th c.")
        artifacts += [base.with_suffix(ext) for ext in (".csv", ".json", ".svg")]
    _summary("curve", run_dir, artifacts)


def cmd_rank(cfg: RunConfig) -> None:
    run_dir = cfg.run_dir()
    settings = cfg.discover_settings
    artifacts = []
    for century in cfg.centuries:
        model_file = _model_path(run_dir, century, settings["model_family"])
        if not model_file.exists():
            raise MissingArtifact("train")
        model = load_model(model_file)
        part = _partition(cfg, century)
        freq = _load_freq(run_dir, century)
        ranked, skipped = score_candidates(
            model, part.candidates, freq, min_count=cfg.min_count,
            jobs=settings["jobs"])
        qpath = _queue_path(run_dir, century)
        export_queue(ranked, qpath, top_n=settings["top_n"], skipped=skipped)
        artifacts.append(qpath)
    _summary("rank", run_dir, artifacts)


def _format_report_table(reports: list[dict]) -> str:
    """Human-readable P/R/F1 table, one row per century, families across."""
    families = sorted({r["model_family"] for r in reports})
    by_cell = {(r["century"], r["model_family"]): r["validation"] for r in reports}
    lines = []
    header = "century " + "  ".join(f"{f:>18}" for f in families)
    sub = " " * 8 + "  ".join(f"{'P':>5} {'R':>5} {'F1':>6}" for _ in families)
    lines += [header, sub]
    for century in sorted({r["century"] for r in reports}):
        cells = []
        for fam in families:
            m = by_cell.get((century, fam))
            if m is None:
                cells.append(" " * 18)
            else:
                cells.append(f"{m['precision']:5.2f} {m['recall']:5.2f} "
                             f"{m['f1']:6.2f}")
        lines.append(f"{century:>4}th  " + "  ".join(cells))
    return "\n".join(lines) + "\n"


def cmd_report(cfg: RunConfig) -> None:
    run_dir = cfg.run_dir()
    reports = []
    for path in sorted(run_dir.glob("report_*_*.json")):
        reports.append(json.loads(path.read_text()))
    if not reports:
        raise MissingArtifact("eval")
    table = _format_report_table(reports)
    out = run_dir / "report.txt"
    out.write_text(table)
    sys.stdout.write(table)
    _summary("report", run_dir, [out])


def cmd_synth(cfg: RunConfig, out: str) -> None:
    synth_cfg = cfg.synth or SynthConfig()
    manifest = generate_corpus(out, synth_cfg)
    _summary("synth", out, [manifest])


def cmd_serve(cfg: RunConfig) -> None:
    import uvicorn
    from .service import create_app
    app = create_app(cfg)
    settings = cfg.service_settings
    uvicorn.run(app, host=settings["host"], port=settings["port"],
                log_level="warning")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="travelscout",
        description="genre discovery pipeline over historical text corpora")
    parser.add_argument("--config", "-c", required=True, help="YAML run config")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one config key")
    parser.add_argument("--jobs", type=int, default=None,
                        help="cap on worker threads for parallel stages")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("prep", "train", "eval", "curve", "rank", "serve", "report"):
        sub.add_parser(name)
    synth = sub.add_parser("synth")
    synth.add_argument("--out", required=True, help="output corpus directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    stage = args.command
    try:
        # synth runs before the corpus it is configured to create exists
        cfg = load_config(args.config, args.overrides,
                          require_paths=stage != "synth")
        if args.jobs is not None:
            cfg.discover_settings["jobs"] = max(1, args.jobs)
        if stage == "synth":
            cmd_synth(cfg, args.out)
        else:
            {"prep": cmd_prep, "train": cmd_train, "eval": cmd_eval,
             "curve": cmd_curve, "rank": cmd_rank, "serve": cmd_serve,
             "report": cmd_report}[stage](cfg)
    except TravelscoutError as exc:
        print(json.dumps({"stage": stage, "ok": False,
                          "error_code": type(exc).__name__,
                          "message": str(exc)}, sort_keys=True),
              file=sys.stderr)
        return _EXIT_CODES.get(type(exc), 4)
    return 0


if __name__ == "__main__":
    sys.exit(main())
