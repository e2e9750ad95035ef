"""Score the unlabeled candidate pool and emit a ranked review queue."""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .corpus import AnnotationRecord, CONFIRM, DocumentRef
from .errors import FingerprintMismatch, UnknownDocId
from .evaluation import profile_for_family
from .features import FrequencyTable, vectorize_document
from .models import model_fingerprint

QUEUE_HEADER = ["rank", "doc_id", "score", "century", "model_fingerprint"]


@dataclass(frozen=True)
class RankedCandidate:
    doc_id: str
    score: float
    rank: int
    model_fingerprint: str
    century: int


@dataclass(frozen=True)
class SkippedCandidate:
    doc_id: str
    reason: str


@dataclass(frozen=True)
class DiscoveryReport:
    century: int
    evaluated_top_n: int
    confirmed: int
    confirmation_rate: float
    rate_defined: bool = True


def _score_one(model, ref, freq, cfg, min_count):
    try:
        text = Path(ref.text_path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        return None, SkippedCandidate(ref.id, str(exc))
    vec = vectorize_document(text, freq, cfg, min_count)
    return (float(model.predict_proba([vec])[0]), ref.id), None


def score_candidates(model, candidates: Sequence[DocumentRef],
                     freq: FrequencyTable, feature_cfg=None, min_count: int = 2,
                     jobs: int = 1,
                     ) -> tuple[list[RankedCandidate], list[SkippedCandidate]]:
    """Vectorize and score every candidate, sorted by descending score with
    ties broken by ascending doc id.

    Unreadable documents are returned as skipped records, never dropped:
    a silent loss in an 88k-volume run would be invisible.
    """
    if model.freq_fingerprint and model.freq_fingerprint != freq.fingerprint():
        raise FingerprintMismatch(
            f"model trained against frequency table {model.freq_fingerprint}, "
            f"got {freq.fingerprint()}")
    cfg = feature_cfg or profile_for_family(model.feature_config, model.family)
    fingerprint = model_fingerprint(model)
    scored: list[tuple[float, str]] = []
    skipped: list[SkippedCandidate] = []
    if jobs > 1:
        # bounded worker pool: documents stream through without holding the
        # whole pool's texts (or file handles) open at once
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(
                lambda ref: _score_one(model, ref, freq, cfg, min_count),
                candidates, chunksize=8)
            for hit, miss in results:
                if hit is not None:
                    scored.append(hit)
                else:
                    skipped.append(miss)
    else:
        for ref in candidates:
            hit, miss = _score_one(model, ref, freq, cfg, min_count)
            if hit is not None:
                scored.append(hit)
            else:
                skipped.append(miss)
    scored.sort(key=lambda t: (-t[0], t[1]))
    century = candidates[0].century if candidates else 0
    ranked = [RankedCandidate(doc_id, score, rank, fingerprint, century)
              for rank, (score, doc_id) in enumerate(scored, start=1)]
    return ranked, skipped


def export_queue(ranked: Sequence[RankedCandidate], path, top_n: int = 200,
                 skipped: Sequence[SkippedCandidate] = ()) -> int:
    """Write the top_n rows as the review-queue CSV; skipped documents go
    to a <path>.skipped.csv sidecar so the queue header stays the contract
    shared with the annotation service."""
    rows = list(ranked[:top_n])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(QUEUE_HEADER)
        for item in rows:
            writer.writerow([item.rank, item.doc_id, f"{item.score:.10f}",
                             item.century, item.model_fingerprint])
    if skipped:
        with open(str(path) + ".skipped.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["doc_id", "reason"])
            for item in skipped:
                writer.writerow([item.doc_id, item.reason])
    return len(rows)


def load_queue(path) -> list[RankedCandidate]:
    items = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            items.append(RankedCandidate(
                doc_id=row["doc_id"], score=float(row["score"]),
                rank=int(row["rank"]), model_fingerprint=row["model_fingerprint"],
                century=int(row["century"])))
    return items


def discovery_report(queue: Sequence[RankedCandidate],
                     verdicts: Sequence[AnnotationRecord]) -> DiscoveryReport:
    """Confirmation statistics over the evaluated prefix of the queue."""
    known = {item.doc_id for item in queue}
    evaluated = 0
    confirmed = 0
    seen: set[str] = set()
    for rec in verdicts:
        if rec.doc_id not in known:
            raise UnknownDocId(rec.doc_id)
        if rec.doc_id in seen:
            continue
        seen.add(rec.doc_id)
        evaluated += 1
        if rec.verdict == CONFIRM:
            confirmed += 1
    century = queue[0].century if queue else 0
    if evaluated:
        return DiscoveryReport(century, evaluated, confirmed, confirmed / evaluated)
    return DiscoveryReport(century, 0, 0, 0.0, rate_defined=False)
