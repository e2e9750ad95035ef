"""Unigram+bigram extraction and feature hashing into fixed-dim sparse vectors."""

import hashlib
import math
import struct
from dataclasses import dataclass, field, asdict
from typing import Iterable

import numpy as np

from .errors import ProfileMismatch
from .textprep import FrequencyTable, filter_rare, tokenize

# Identifier written into model files; loading a file that names a different
# hash function fails rather than silently mis-indexing features.
HASH_FUNCTION_ID = "blake2b-64"

_SIGN_PERSON = b"sign"


def stable_hash64(data: bytes, person: bytes = b"") -> int:
    """Seed-free 64-bit hash, identical across platforms and Python versions."""
    digest = hashlib.blake2b(data, digest_size=8, person=person).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class FeatureConfig:
    ngram_min: int = 1
    ngram_max: int = 2
    hash_dim: int = 2 ** 20
    signed: bool = True
    normalize: str = "l2"     # "none" | "l2"
    weighting: str = "count"  # "count" | "binary"

    def __post_init__(self):
        if not (1 <= self.ngram_min <= self.ngram_max):
            raise ValueError("need 1 <= ngram_min <= ngram_max")
        if self.hash_dim < 2 ** 10 or self.hash_dim & (self.hash_dim - 1):
            raise ValueError("hash_dim must be a power of two >= 2**10")
        if self.normalize not in ("none", "l2"):
            raise ValueError(f"unknown normalize mode {self.normalize!r}")
        if self.weighting not in ("count", "binary"):
            raise ValueError(f"unknown weighting {self.weighting!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureConfig":
        return cls(**d)

    @classmethod
    def linear_profile(cls, hash_dim: int = 2 ** 20, **kw) -> "FeatureConfig":
        """Signed hashing + L2 norm: the profile for SVM/LogReg/MLP."""
        return cls(hash_dim=hash_dim, signed=True, normalize="l2",
                   weighting="count", **kw)

    @classmethod
    def mnb_profile(cls, hash_dim: int = 2 ** 20, **kw) -> "FeatureConfig":
        """Unsigned raw counts: multinomial likelihoods need non-negative
        integer-like features, so the signed profile is not usable here."""
        return cls(hash_dim=hash_dim, signed=False, normalize="none",
                   weighting="count", **kw)


@dataclass(frozen=True)
class SparseVector:
    """Immutable sparse vector: strictly increasing indices, no stored zeros."""
    indices: np.ndarray
    weights: np.ndarray
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.weights ** 2)))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.weights
        return out


def extract_ngrams(tokens: list[str], cfg: FeatureConfig) -> list[str]:
    """All contiguous n-grams for n in [ngram_min, ngram_max], each joined
    by a single space; document order within each gram length."""
    grams = []
    n_tokens = len(tokens)
    for n in range(cfg.ngram_min, cfg.ngram_max + 1):
        for i in range(n_tokens - n + 1):
            grams.append(" ".join(tokens[i:i + n]))
    return grams


def hash_vectorize(grams: Iterable[str], cfg: FeatureConfig) -> SparseVector:
    """Map grams to indices via the stable 64-bit hash and accumulate weights.

    Signed mode draws an independent hash bit per gram for the ±1 factor, so
    colliding grams tend to cancel rather than pile up.  Binary weighting
    saturates each distinct gram at 1 before signing.  Entries that sum to
    exactly zero are dropped.
    """
    if cfg.weighting == "binary":
        grams = dict.fromkeys(grams)  # dedupe, keep order
    mask = cfg.hash_dim - 1
    acc: dict[int, float] = {}
    for g in grams:
        raw = g.encode("utf-8")
        idx = stable_hash64(raw) & mask
        w = 1.0
        if cfg.signed and stable_hash64(raw, _SIGN_PERSON) & 1:
            w = -1.0
        acc[idx] = acc.get(idx, 0.0) + w
    items = sorted((i, w) for i, w in acc.items() if w != 0.0)
    indices = np.array([i for i, _ in items], dtype=np.int64)
    weights = np.array([w for _, w in items], dtype=np.float64)
    if cfg.normalize == "l2" and len(weights):
        weights = weights / math.sqrt(float(np.sum(weights ** 2)))
    return SparseVector(indices, weights, cfg.hash_dim)


def vectorize_document(text: str, freq: FrequencyTable, cfg: FeatureConfig,
                       min_count: int = 2) -> SparseVector:
    """tokenize -> drop rare tokens -> n-grams -> hashed sparse vector."""
    tokens = filter_rare(tokenize(text), freq, min_count)
    return hash_vectorize(extract_ngrams(tokens, cfg), cfg)


class HashingNgramVectorizer:
    """Stateless transformer from raw text to hashed sparse vectors.

    fit() records the corpus frequency table used for the min-frequency
    filter; transform() maps each text to a SparseVector.
    """

    def __init__(self, config: FeatureConfig | None = None, min_count: int = 2):
        self.config = config or FeatureConfig()
        self.min_count = min_count
        self.freq_: FrequencyTable | None = None

    def get_params(self) -> dict:
        return {"config": self.config, "min_count": self.min_count}

    def fit(self, texts: Iterable[str]) -> "HashingNgramVectorizer":
        table = FrequencyTable()
        for text in texts:
            table.add(tokenize(text))
        self.freq_ = table
        return self

    def set_frequency_table(self, table: FrequencyTable) -> "HashingNgramVectorizer":
        self.freq_ = table
        return self

    def transform(self, texts: Iterable[str]) -> list[SparseVector]:
        if self.freq_ is None:
            raise ProfileMismatch("vectorizer not fitted: no frequency table")
        return [vectorize_document(t, self.freq_, self.config, self.min_count)
                for t in texts]

    def fit_transform(self, texts: list[str]) -> list[SparseVector]:
        return self.fit(texts).transform(texts)


# --- binary vector cache ------------------------------------------------
# Record: u32 dim, u32 entry count, then (varint index, float32 LE weight)
# pairs.  Used to cache vectorized corpora between runs.

def _write_varint(out: bytearray, value: int) -> None:
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def _read_varint(buf: bytes, pos: int) -> tuple[int, int]:
    shift = 0
    value = 0
    while True:
        byte = buf[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7


def vector_to_bytes(vec: SparseVector) -> bytes:
    out = bytearray(struct.pack("<II", vec.dim, vec.nnz))
    for idx, w in zip(vec.indices, vec.weights):
        _write_varint(out, int(idx))
        out += struct.pack("<f", float(w))
    return bytes(out)


def vector_from_bytes(buf: bytes, pos: int = 0) -> tuple[SparseVector, int]:
    dim, count = struct.unpack_from("<II", buf, pos)
    pos += 8
    indices = np.empty(count, dtype=np.int64)
    weights = np.empty(count, dtype=np.float64)
    for k in range(count):
        indices[k], pos = _read_varint(buf, pos)
        weights[k] = struct.unpack_from("<f", buf, pos)[0]
        pos += 4
    return SparseVector(indices, weights, dim), pos


def save_vectors(path, vectors: list[SparseVector]) -> None:
    out = bytearray(struct.pack("<I", len(vectors)))
    for v in vectors:
        out += vector_to_bytes(v)
    with open(path, "wb") as fh:
        fh.write(out)


def load_vectors(path) -> list[SparseVector]:
    buf = open(path, "rb").read()
    (count,) = struct.unpack_from("<I", buf, 0)
    pos = 4
    vectors = []
    for _ in range(count):
        vec, pos = vector_from_bytes(buf, pos)
        vectors.append(vec)
    return vectors
