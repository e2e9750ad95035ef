import csv

import numpy as np
import pytest

from travelscout.corpus import AnnotationRecord, DocumentRef
from travelscout.discover import (QUEUE_HEADER, RankedCandidate, discovery_report,
                                  export_queue, load_queue, score_candidates)
from travelscout.errors import FingerprintMismatch, UnknownDocId
from travelscout.evaluation import run_experiment
from travelscout.features import FeatureConfig
from travelscout.models import TrainConfig

FEATURES = FeatureConfig(hash_dim=2 ** 12)
TRAIN = TrainConfig(epochs=10, learning_rate=0.1, batch_size=16, seed=0,
                    hidden_units=16)


@pytest.fixture(scope="module")
def trained(small_partition, small_freq):
    _, model = run_experiment(small_partition, FEATURES, TRAIN, "svm",
                              freq=small_freq, seed=0, baseline_trials=10)
    return model


def test_score_candidates_ranks_planted_first(small_corpus, small_partition,
                                              small_freq, trained):
    import json
    outdir, _, cfg = small_corpus
    ranked, skipped = score_candidates(trained, small_partition.candidates,
                                       small_freq)
    assert skipped == []
    assert len(ranked) == len(small_partition.candidates)
    assert [r.rank for r in ranked] == list(range(1, len(ranked) + 1))
    scores = [r.score for r in ranked]
    assert scores == sorted(scores, reverse=True)
    planted = set(json.loads((outdir / "planted.json").read_text())["planted_ids"])
    top = {r.doc_id for r in ranked[:len(planted)]}
    assert len(top & planted) >= len(planted) - 1


def test_score_candidates_deterministic(small_partition, small_freq, trained):
    a, _ = score_candidates(trained, small_partition.candidates, small_freq)
    b, _ = score_candidates(trained, small_partition.candidates, small_freq)
    assert a == b


def test_score_candidates_parallel_matches_serial(small_partition, small_freq,
                                                  trained):
    a, _ = score_candidates(trained, small_partition.candidates, small_freq)
    b, _ = score_candidates(trained, small_partition.candidates, small_freq,
                            jobs=4)
    assert a == b


def test_score_candidates_empty_pool(small_freq, trained):
    ranked, skipped = score_candidates(trained, [], small_freq)
    assert ranked == [] and skipped == []


def test_score_candidates_records_unreadable(small_partition, small_freq, trained):
    bad = DocumentRef(id="ghost", century=17, text_path="/nonexistent/ghost.txt")
    ranked, skipped = score_candidates(
        trained, list(small_partition.candidates) + [bad], small_freq)
    assert [s.doc_id for s in skipped] == ["ghost"]
    ids = {r.doc_id for r in ranked} | {s.doc_id for s in skipped}
    assert ids == {r.id for r in small_partition.candidates} | {"ghost"}


def test_score_candidates_fingerprint_guard(small_partition, trained):
    from travelscout.textprep import build_frequency_table
    other = build_frequency_table([["ganz", "andere", "tabelle"]])
    with pytest.raises(FingerprintMismatch):
        score_candidates(trained, small_partition.candidates, other)


def test_tie_break_by_doc_id():
    ranked = [("b", 0.9), ("c", 0.2), ("a", 0.9)]
    items = sorted(ranked, key=lambda t: (-t[1], t[0]))
    assert [i[0] for i in items] == ["a", "b", "c"]


def test_export_queue_roundtrip(tmp_path, small_partition, small_freq, trained):
    ranked, _ = score_candidates(trained, small_partition.candidates, small_freq)
    path = tmp_path / "queue.csv"
    wrote = export_queue(ranked, path, top_n=20)
    assert wrote == 20
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == QUEUE_HEADER
    assert len(rows) == 21
    loaded = load_queue(path)
    assert [q.rank for q in loaded] == list(range(1, 21))
    assert loaded[0].doc_id == ranked[0].doc_id


def test_export_queue_fewer_than_top_n(tmp_path):
    ranked = [RankedCandidate(f"d{i}", 0.5, i + 1, "fp", 17) for i in range(5)]
    assert export_queue(ranked, tmp_path / "q.csv", top_n=200) == 5


def rec(doc_id, verdict):
    return AnnotationRecord(doc_id, verdict, "ann", "2026-01-01T00:00:00+00:00")


def test_discovery_report_counts():
    queue = [RankedCandidate(f"d{i}", 0.9 - i * 0.01, i + 1, "fp", 16)
             for i in range(200)]
    verdicts = [rec(f"d{i}", "confirm") for i in range(25)] + \
               [rec(f"d{i}", "reject") for i in range(25, 200)]
    report = discovery_report(queue, verdicts)
    assert report.evaluated_top_n == 200
    assert report.confirmed == 25
    assert abs(report.confirmation_rate - 0.125) < 1e-12


def test_discovery_report_empty_and_full():
    queue = [RankedCandidate("d0", 0.9, 1, "fp", 17)]
    empty = discovery_report(queue, [])
    assert empty.evaluated_top_n == 0 and not empty.rate_defined
    assert empty.confirmation_rate == 0.0
    full = discovery_report(queue, [rec("d0", "confirm")])
    assert full.confirmation_rate == 1.0


def test_discovery_report_unknown_doc():
    with pytest.raises(UnknownDocId):
        discovery_report([RankedCandidate("d0", 0.9, 1, "fp", 17)],
                         [rec("nope", "confirm")])


def test_ranking_invariant_under_monotone_transform(small_partition, small_freq,
                                                    trained):
    vecs_scores = score_candidates(trained, small_partition.candidates, small_freq)[0]
    by_score = [r.doc_id for r in vecs_scores]
    from travelscout.evaluation import vectorize_refs
    vectors = vectorize_refs(small_partition.candidates, small_freq,
                             trained.feature_config)
    margins = [(float(trained.margin(vectors[r.id])), r.id)
               for r in small_partition.candidates]
    margins.sort(key=lambda t: (-t[0], t[1]))
    assert [doc_id for _, doc_id in margins] == by_score
