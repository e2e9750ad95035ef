"""Manifest ingestion, century partitioning, negative sampling and the
annotation feedback loop."""

import json
import random
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional

from .errors import (ConflictingVerdicts, DuplicateId, InsufficientCandidates,
                     MalformedLine, MissingField, UnknownDocId)

CENTURIES = (16, 17, 18, 19)

TRAVELOGUE = "travelogue"
NON_TRAVELOGUE = "non_travelogue"
LABELS = (TRAVELOGUE, NON_TRAVELOGUE)

PROVENANCES = ("keyword_search", "random_sample", "model_discovery")

CONFIRM = "confirm"
REJECT = "reject"
UNCERTAIN = "uncertain"
VERDICTS = (CONFIRM, REJECT, UNCERTAIN)


@dataclass(frozen=True)
class DocumentRef:
    id: str
    century: int
    text_path: str
    label: Optional[str] = None
    provenance: str = "random_sample"

    def __post_init__(self):
        if self.century not in CENTURIES:
            raise ValueError(f"century must be one of {CENTURIES}, got {self.century}")
        if self.label is not None and self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS} or None, got {self.label!r}")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def to_json(self) -> dict:
        return {"id": self.id, "century": self.century, "text_path": self.text_path,
                "label": self.label, "provenance": self.provenance}


@dataclass(frozen=True)
class CorpusPartition:
    century: int
    positives: tuple[DocumentRef, ...]
    negatives: tuple[DocumentRef, ...]
    candidates: tuple[DocumentRef, ...]

    def __post_init__(self):
        seen = set()
        for ref in self.positives + self.negatives + self.candidates:
            if ref.id in seen:
                raise DuplicateId(ref.id)
            seen.add(ref.id)
            if ref.century != self.century:
                raise ValueError(f"{ref.id}: century {ref.century} != partition {self.century}")

    def find(self, doc_id: str) -> DocumentRef:
        for ref in self.positives + self.negatives + self.candidates:
            if ref.id == doc_id:
                return ref
        raise UnknownDocId(doc_id)


@dataclass(frozen=True)
class AnnotationRecord:
    doc_id: str
    verdict: str
    annotator: str
    timestamp: str  # ISO 8601 UTC
    round: int = 0

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")
        if self.round < 0:
            raise ValueError("round must be >= 0")

    @classmethod
    def now(cls, doc_id: str, verdict: str, annotator: str, round: int = 0):
        ts = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return cls(doc_id, verdict, annotator, ts, round)

    def to_json(self) -> dict:
        return {"doc_id": self.doc_id, "verdict": self.verdict,
                "annotator": self.annotator, "timestamp": self.timestamp,
                "round": self.round}

    @classmethod
    def from_json(cls, d: dict) -> "AnnotationRecord":
        return cls(d["doc_id"], d["verdict"], d["annotator"], d["timestamp"],
                   int(d.get("round", 0)))


_MANIFEST_FIELDS = ("id", "century", "text_path")


def load_manifest(path) -> list[DocumentRef]:
    """Parse a JSON Lines manifest, one document per line, in file order.

    Fails fast on the first malformed line or duplicate id: silently
    skipping records would skew every downstream class balance.
    """
    refs: list[DocumentRef] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_no, str(exc)) from exc
            if not isinstance(obj, dict):
                raise MalformedLine(line_no, "not a JSON object")
            for name in _MANIFEST_FIELDS:
                if name not in obj:
                    raise MissingField(name, line_no)
            if obj["id"] in seen:
                raise DuplicateId(obj["id"], line_no)
            seen.add(obj["id"])
            try:
                refs.append(DocumentRef(
                    id=obj["id"], century=int(obj["century"]),
                    text_path=obj["text_path"], label=obj.get("label"),
                    provenance=obj.get("provenance", "random_sample")))
            except (ValueError, TypeError) as exc:
                raise MalformedLine(line_no, str(exc)) from exc
    return refs


def save_manifest(refs: Iterable[DocumentRef], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ref in refs:
            fh.write(json.dumps(ref.to_json(), ensure_ascii=False, sort_keys=True) + "\n")


def partition(refs: Iterable[DocumentRef], century: int) -> CorpusPartition:
    """Route refs of one century into positives/negatives/candidates by label."""
    pos, neg, cand = [], [], []
    for ref in refs:
        if ref.century != century:
            continue
        if ref.label == TRAVELOGUE:
            pos.append(ref)
        elif ref.label == NON_TRAVELOGUE:
            neg.append(ref)
        else:
            cand.append(ref)
    return CorpusPartition(century, tuple(pos), tuple(neg), tuple(cand))


def sample_negatives(part: CorpusPartition, n: int, seed: int) -> list[DocumentRef]:
    """Draw n distinct candidates uniformly without replacement.

    The draw only proposes negatives; each drawn volume still goes through
    expert verification before it enters the negative ground truth.
    """
    if n > len(part.candidates):
        raise InsufficientCandidates(n, len(part.candidates))
    rng = random.Random(seed)
    return rng.sample(list(part.candidates), n)


def apply_annotations(part: CorpusPartition,
                      records: Iterable[AnnotationRecord]) -> CorpusPartition:
    """Fold expert verdicts back into a partition.

    Confirm moves a candidate into the positives, Reject into the
    negatives, Uncertain parks it in the candidates pool.  A document with
    both a Confirm and a Reject in the same round is a conflict that
    humans must resolve first.
    Conflicts are per round: a later round may overturn an earlier one.
    """
    known = {ref.id for ref in part.positives + part.negatives + part.candidates}
    by_round: dict[str, dict[int, str]] = {}
    for rec in records:
        if rec.doc_id not in known:
            raise UnknownDocId(rec.doc_id)
        if rec.verdict == UNCERTAIN:
            by_round.setdefault(rec.doc_id, {})
            continue
        rounds = by_round.setdefault(rec.doc_id, {})
        previous = rounds.get(rec.round)
        if previous is not None and previous != rec.verdict:
            raise ConflictingVerdicts(rec.doc_id)
        rounds[rec.round] = rec.verdict

    decisions = {doc_id: rounds[max(rounds)]
                 for doc_id, rounds in by_round.items() if rounds}

    pos = list(part.positives)
    neg = list(part.negatives)
    cand = []
    for ref in part.candidates:
        decision = decisions.get(ref.id)
        if decision == CONFIRM:
            pos.append(replace(ref, label=TRAVELOGUE, provenance="model_discovery"))
        elif decision == REJECT:
            neg.append(replace(ref, label=NON_TRAVELOGUE, provenance="model_discovery"))
        else:
            cand.append(ref)
    return CorpusPartition(part.century, tuple(pos), tuple(neg), tuple(cand))


# --- annotation log (append-only JSON Lines) ---

def append_annotation(path, record: AnnotationRecord) -> None:
    """Append one record and fsync so the verdict is durable before any ack."""
    import os
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record.to_json(), ensure_ascii=False, sort_keys=True) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def load_annotation_log(path) -> list[AnnotationRecord]:
    path = Path(path)
    if not path.exists():
        return []
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(AnnotationRecord.from_json(json.loads(line)))
    return records
