"""Synthetic corpus generator.

The real historical corpus is proprietary, so experiments and acceptance
checks run against a generated stand-in: two topic vocabularies with a
configurable shared fraction, plus a configurable rate of OCR-like noise
tokens.
"""

import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .corpus import DocumentRef, save_manifest

_LETTERS = "abcdefghijklmnopqrstuvwxyzäöüß"


@dataclass(frozen=True)
class SynthConfig:
    docs_per_class: int = 200
    doc_tokens: int = 2000
    vocab_size: int = 1000       # per topic
    shared_fraction: float = 0.2
    noise_rate: float = 0.05
    candidates: int = 0
    planted_positives: int = 0   # candidates drawn from the positive topic
    century: int = 17
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _make_vocab(cfg: SynthConfig) -> tuple[list[str], list[str]]:
    n_shared = int(cfg.vocab_size * cfg.shared_fraction)
    n_own = cfg.vocab_size - n_shared
    shared = [f"gemein{i:05d}" for i in range(n_shared)]
    pos_vocab = [f"reisewort{i:05d}" for i in range(n_own)] + shared
    neg_vocab = [f"anderwort{i:05d}" for i in range(n_own)] + shared
    return pos_vocab, neg_vocab


def _noise_word(rng) -> str:
    length = int(rng.integers(2, 9))
    return "".join(_LETTERS[i] for i in rng.integers(0, len(_LETTERS), length))


def _make_doc(rng, vocab: list[str], cfg: SynthConfig) -> str:
    words = []
    picks = rng.integers(0, len(vocab), cfg.doc_tokens)
    noisy = rng.random(cfg.doc_tokens) < cfg.noise_rate
    for k in range(cfg.doc_tokens):
        words.append(_noise_word(rng) if noisy[k] else vocab[picks[k]])
        if k % 13 == 12:
            words[-1] += ","    # some interpunctuation for the tokenizer
        elif k % 31 == 30:
            words[-1] += "."
    return " ".join(words)


def generate_corpus(outdir, cfg: SynthConfig) -> Path:
    """Write text files plus a manifest; returns the manifest path.

    Candidates are unlabeled; the ids of planted positive candidates go to
    planted.json next to the manifest so experiments can verify enrichment.
    """
    outdir = Path(outdir)
    texts = outdir / "texts"
    texts.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    pos_vocab, neg_vocab = _make_vocab(cfg)

    refs: list[DocumentRef] = []

    def write_doc(doc_id: str, vocab: list[str], label, provenance):
        path = texts / f"{doc_id}.txt"
        path.write_text(_make_doc(rng, vocab, cfg), encoding="utf-8")
        refs.append(DocumentRef(id=doc_id, century=cfg.century,
                                text_path=str(path), label=label,
                                provenance=provenance))

    for i in range(cfg.docs_per_class):
        write_doc(f"pos{i:05d}", pos_vocab, "travelogue", "keyword_search")
    for i in range(cfg.docs_per_class):
        write_doc(f"neg{i:05d}", neg_vocab, "non_travelogue", "random_sample")

    planted = set()
    if cfg.candidates:
        if cfg.planted_positives > cfg.candidates:
            raise ValueError("planted_positives cannot exceed candidates")
        slots = rng.choice(cfg.candidates, cfg.planted_positives, replace=False)
        planted = {int(s) for s in slots}
        for i in range(cfg.candidates):
            vocab = pos_vocab if i in planted else neg_vocab
            write_doc(f"cand{i:05d}", vocab, None, "random_sample")

    manifest = outdir / "manifest.jsonl"
    save_manifest(refs, manifest)
    (outdir / "planted.json").write_text(json.dumps(
        {"planted_ids": sorted(f"cand{i:05d}" for i in planted),
         "config": cfg.to_dict()}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    return manifest
