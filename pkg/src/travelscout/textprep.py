"""Tokenization and corpus-level token statistics.

Rules: split on every character that is not a Unicode letter or digit,
lowercase everything, drop tokens with fewer than two alphanumeric
characters, and (optionally) drop tokens that occur fewer than twice
in the reference corpus.
"""

import hashlib
import re
from collections import Counter
from pathlib import Path
from typing import Iterable, Iterator

from .errors import EmptyCorpus

# Underscore counts as \w but is not alphanumeric, so exclude it explicitly.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

MIN_TOKEN_ALNUM = 2


def tokenize(text: str) -> list[str]:
    """Split ``text`` into lowercase word tokens.

    Every non-alphanumeric character is a separator; tokens shorter than
    two characters are dropped.  Lowercasing is Unicode-aware (umlauts,
    sharp s, etc. survive).
    """
    lowered = text.lower()
    return [t for t in _TOKEN_RE.findall(lowered) if len(t) >= MIN_TOKEN_ALNUM]


class FrequencyTable:
    """Token occurrence counts over a set of documents.

    Tables merge associatively, so large corpora can be counted in
    shards and combined afterwards.
    """

    def __init__(self):
        self.counts: Counter = Counter()
        self.total_tokens = 0
        self.doc_count = 0

    def add(self, tokens: Iterable[str]) -> None:
        n = 0
        for t in tokens:
            self.counts[t] += 1
            n += 1
        self.total_tokens += n
        self.doc_count += 1

    def merge(self, other: "FrequencyTable") -> None:
        self.counts.update(other.counts)
        self.total_tokens += other.total_tokens
        self.doc_count += other.doc_count

    def __contains__(self, token):
        return token in self.counts

    def count(self, token: str) -> int:
        return self.counts.get(token, 0)

    def __len__(self):
        return len(self.counts)

    # --- serialization (sorted TSV, one "token\tcount" per line) ---

    def to_bytes(self) -> bytes:
        lines = [f"{t}\t{c}" for t, c in sorted(self.counts.items())]
        header = f"#docs\t{self.doc_count}\n"
        return (header + "\n".join(lines) + ("\n" if lines else "")).encode("utf-8")

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "FrequencyTable":
        table = cls()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                key, value = line.split("\t")
                if key == "#docs":
                    table.doc_count = int(value)
                else:
                    table.counts[key] = int(value)
        table.total_tokens = sum(table.counts.values())
        return table

    def fingerprint(self) -> str:
        """Stable content hash, embedded in model files to pin the
        preprocessing state a model was trained against."""
        return hashlib.sha256(self.to_bytes()).hexdigest()[:16]


def build_frequency_table(docs: Iterable[Iterable[str]]) -> FrequencyTable:
    """Count token occurrences over all token streams in ``docs``."""
    table = FrequencyTable()
    for tokens in docs:
        table.add(tokens)
    return table


def filter_rare(tokens: list[str], table: FrequencyTable, min_count: int = 2) -> list[str]:
    """Drop tokens whose corpus count is below ``min_count``, keeping order.

    A token absent from the table counts as 0 and is dropped.
    """
    if min_count <= 1:
        return list(tokens)
    return [t for t in tokens if table.count(t) >= min_count]


def corpus_stats(docs: Iterable[Iterable[str]]) -> tuple[int, int]:
    """Return (total tokens, average tokens per document, rounded to int)."""
    total = 0
    n_docs = 0
    for tokens in docs:
        total += sum(1 for _ in tokens)
        n_docs += 1
    if n_docs == 0:
        raise EmptyCorpus("no documents")
    return total, round(total / n_docs)


def iter_token_streams(paths: Iterable) -> Iterator[list[str]]:
    """Tokenize a sequence of UTF-8 text files, one stream per file."""
    for p in paths:
        yield tokenize(Path(p).read_text(encoding="utf-8"))
