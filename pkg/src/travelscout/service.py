"""HTTP service for the expert-review loop.

Read-mostly and file-backed: review queues come from the rank stage's CSV
exports, verdicts go to an append-only JSON Lines log (fsynced before any
response), and a restart replays the log into identical state.  The built
review UI, when present, is served statically at the root.
"""

import json
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse

from .config import RunConfig
from .corpus import (CONFIRM, REJECT, UNCERTAIN, AnnotationRecord, DocumentRef,
                     append_annotation, load_annotation_log, load_manifest)
from .discover import load_queue
from .errors import NoQueueForCentury, UnknownDocId

_CHUNK = 64 * 1024


class ReviewState:
    """Queues, document metadata, and the annotation log for one run."""

    def __init__(self, run_dir: Path, manifests: dict[int, Path],
                 log_path: Path, excerpt_chars: int = 4000,
                 current_round: int = 0):
        self.run_dir = Path(run_dir)
        self.log_path = Path(log_path)
        self.excerpt_chars = excerpt_chars
        self.current_round = current_round
        self._write_lock = threading.Lock()

        self.queues: dict[int, list] = {}
        for qfile in sorted(self.run_dir.glob("queue_*.csv")):
            century = int(qfile.stem.split("_")[1])
            self.queues[century] = load_queue(qfile)

        self.docs: dict[str, DocumentRef] = {}
        for path in manifests.values():
            for ref in load_manifest(path):
                self.docs[ref.id] = ref

        self.records: list[AnnotationRecord] = load_annotation_log(self.log_path)

    # --- verdict bookkeeping ---

    def records_for(self, doc_id: str) -> list[AnnotationRecord]:
        return [r for r in self.records if r.doc_id == doc_id]

    def doc_status(self, doc_id: str) -> tuple[Optional[str], bool]:
        """(latest verdict or None, disagreement flag among confirm/reject)."""
        recs = self.records_for(doc_id)
        if not recs:
            return None, False
        hard = {r.verdict for r in recs if r.verdict in (CONFIRM, REJECT)}
        return recs[-1].verdict, len(hard) > 1

    def post_verdict(self, doc_id: str, verdict: str, annotator: str
                     ) -> tuple[AnnotationRecord, bool, bool]:
        """Returns (record, created, conflict).

        Identical re-posts are idempotent; a different verdict from the
        same annotator in the same round is a conflict and returns the
        existing record untouched.
        """
        if not any(item.doc_id == doc_id
                   for queue in self.queues.values() for item in queue):
            raise UnknownDocId(doc_id)
        with self._write_lock:
            for rec in self.records:
                if (rec.doc_id == doc_id and rec.annotator == annotator
                        and rec.round == self.current_round):
                    if rec.verdict == verdict:
                        return rec, False, False
                    return rec, False, True
            record = AnnotationRecord.now(doc_id, verdict, annotator,
                                          round=self.current_round)
            append_annotation(self.log_path, record)
            self.records.append(record)
            return record, True, False

    def progress(self, century: int) -> dict:
        if century not in self.queues:
            raise NoQueueForCentury(century)
        queue = self.queues[century]
        ids = {item.doc_id for item in queue}
        confirmed = rejected = conflicts = 0
        evaluated_ids = set()
        for doc_id in ids:
            hard = {r.verdict for r in self.records_for(doc_id)
                    if r.verdict in (CONFIRM, REJECT)}
            if not hard:
                continue
            evaluated_ids.add(doc_id)
            if hard == {CONFIRM}:
                confirmed += 1
            elif hard == {REJECT}:
                rejected += 1
            else:
                conflicts += 1
        evaluated = len(evaluated_ids)
        return {
            "century": century,
            "evaluated": evaluated,
            "confirmed": confirmed,
            "rejected": rejected,
            "conflicts": conflicts,
            "remaining": len(ids) - evaluated,
            "confirmation_rate": confirmed / evaluated if evaluated else 0.0,
            "rate_defined": bool(evaluated),
        }

    def export_ground_truth(self, round: int) -> str:
        """Manifest fragment: confirmed docs as labeled positives, rejected
        as labeled negatives.  Disagreements are excluded (flagged in
        progress, resolved by humans, never auto-decided)."""
        lines = []
        seen = set()
        for rec in self.records:
            if rec.round != round or rec.doc_id in seen:
                continue
            hard = {r.verdict for r in self.records_for(rec.doc_id)
                    if r.round == round and r.verdict in (CONFIRM, REJECT)}
            if len(hard) != 1:
                continue
            seen.add(rec.doc_id)
            ref = self.docs.get(rec.doc_id)
            if ref is None:
                continue
            label = "travelogue" if hard == {CONFIRM} else "non_travelogue"
            row = {"id": ref.id, "century": ref.century,
                   "text_path": ref.text_path, "label": label,
                   "provenance": "model_discovery"}
            lines.append(json.dumps(row, ensure_ascii=False, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")

    def queue_page(self, century: int, offset: int, limit: int) -> dict:
        if century not in self.queues:
            raise NoQueueForCentury(century)
        queue = self.queues[century]
        items = []
        for item in queue[offset:offset + limit]:
            ref = self.docs.get(item.doc_id)
            excerpt = ""
            available = False
            if ref is not None:
                path = Path(ref.text_path)
                if path.exists():
                    available = True
                    with open(path, encoding="utf-8", errors="replace") as fh:
                        excerpt = fh.read(self.excerpt_chars)
            verdict, disagreement = self.doc_status(item.doc_id)
            items.append({
                "rank": item.rank, "doc_id": item.doc_id,
                "score": item.score, "century": item.century,
                "model_fingerprint": item.model_fingerprint,
                "text_excerpt": excerpt, "full_text_available": available,
                "current_verdict": verdict, "disagreement": disagreement,
            })
        return {"items": items, "total": len(queue),
                "offset": offset, "limit": limit}

    def text_path(self, doc_id: str) -> Path:
        ref = self.docs.get(doc_id)
        if ref is None or not Path(ref.text_path).exists():
            raise UnknownDocId(doc_id)
        return Path(ref.text_path)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"error_code": code, "message": message},
                        status_code=status)


def create_app(cfg: RunConfig) -> FastAPI:
    settings = cfg.service_settings
    run_dir = cfg.run_dir()
    log_path = Path(settings["annotation_log"])
    if not log_path.is_absolute():
        log_path = run_dir / log_path
    state = ReviewState(run_dir, cfg.manifests, log_path,
                        excerpt_chars=settings["excerpt_chars"],
                        current_round=settings["round"])
    return build_app(state, ui_dir=settings.get("ui_dir"))


def build_app(state: ReviewState, ui_dir=None) -> FastAPI:
    app = FastAPI(title="travelscout review service")
    app.state.review = state

    @app.exception_handler(NoQueueForCentury)
    async def _no_queue(request: Request, exc: NoQueueForCentury):
        return _error(404, "NoQueueForCentury", str(exc))

    @app.exception_handler(UnknownDocId)
    async def _unknown_doc(request: Request, exc: UnknownDocId):
        return _error(404, "UnknownDocId", str(exc))

    @app.get("/api/queue")
    def get_queue(century: int, offset: int = 0, limit: int = 20):
        return state.queue_page(century, max(0, offset), max(1, limit))

    @app.get("/api/doc/{doc_id}/text")
    def get_text(doc_id: str):
        path = state.text_path(doc_id)

        def stream():
            with open(path, "rb") as fh:
                while chunk := fh.read(_CHUNK):
                    yield chunk

        return StreamingResponse(stream(), media_type="text/plain; charset=utf-8")

    @app.post("/api/verdict")
    async def post_verdict(request: Request):
        body = await request.json()
        for field in ("doc_id", "verdict", "annotator"):
            if not body.get(field):
                return _error(422, "MissingField", f"{field} is required")
        if body["verdict"] not in (CONFIRM, REJECT, UNCERTAIN):
            return _error(422, "BadVerdict", f"unknown verdict {body['verdict']!r}")
        record, created, conflict = state.post_verdict(
            body["doc_id"], body["verdict"], body["annotator"])
        if conflict:
            return JSONResponse(
                {"error_code": "ConflictingVerdict",
                 "message": "a different verdict by this annotator exists "
                            "for this round",
                 "existing": record.to_json()},
                status_code=409)
        return JSONResponse(record.to_json(), status_code=201 if created else 200)

    @app.get("/api/progress")
    def get_progress(century: int):
        return state.progress(century)

    @app.get("/api/export")
    def export(round: int = 0):
        return PlainTextResponse(state.export_ground_truth(round),
                                 media_type="application/jsonl")

    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
