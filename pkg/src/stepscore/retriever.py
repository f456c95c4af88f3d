"""Deterministic lexical retrieval over a small document corpus.

BM25 scoring with fixed parameters and a stable tie-break (ascending id), so
the same corpus and query always return the same ranked passages. Meant for
offline evaluation corpora, not production search.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateId

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class Document:
    """One retrievable passage."""

    id: str
    title: str
    body: str

    def to_dict(self) -> dict:
        return {"id": self.id, "title": self.title, "body": self.body}


@dataclass(frozen=True)
class Bm25Params:
    """BM25 shape parameters: term saturation (k1) and length penalty (b)."""

    k1: float = 1.5
    b: float = 0.75


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumerics (underscore included)."""
    return _TOKEN_RE.findall(text.lower())


class CorpusIndex:
    """Inverted index over a corpus; build with index_corpus."""

    def __init__(self, documents: tuple[Document, ...], params: Bm25Params) -> None:
        self.documents = documents
        self.params = params
        self._doc_lengths: list[int] = []
        self._postings: dict[str, dict[int, int]] = {}
        for position, doc in enumerate(documents):
            tokens = tokenize(doc.title + " " + doc.body)
            self._doc_lengths.append(len(tokens))
            for token in tokens:
                counts = self._postings.setdefault(token, {})
                counts[position] = counts.get(position, 0) + 1
        total = sum(self._doc_lengths)
        self._avg_length = total / len(documents) if documents else 0.0

    def __len__(self) -> int:
        return len(self.documents)

    def idf(self, token: str) -> float:
        """Smoothed inverse document frequency; positive for every indexed token."""
        doc_freq = len(self._postings.get(token, ()))
        return math.log(1.0 + (len(self.documents) - doc_freq + 0.5) / (doc_freq + 0.5))

    def score(self, query: str, position: int) -> float:
        """BM25 score of one document against a query; repeated query terms add."""
        k1, b = self.params.k1, self.params.b
        length_norm = 1.0 - b + b * (self._doc_lengths[position] / self._avg_length)
        total = 0.0
        for token in tokenize(query):
            term_freq = self._postings.get(token, {}).get(position, 0)
            if term_freq == 0:
                continue
            total += self.idf(token) * term_freq * (k1 + 1.0) / (term_freq + k1 * length_norm)
        return total

    def candidate_positions(self, query: str) -> set[int]:
        positions: set[int] = set()
        for token in set(tokenize(query)):
            positions.update(self._postings.get(token, ()))
        return positions


def index_corpus(documents: list[Document], params: Bm25Params | None = None) -> CorpusIndex:
    """Build an index, rejecting duplicate document ids."""
    seen: set[str] = set()
    for doc in documents:
        if doc.id in seen:
            raise DuplicateId(f"corpus has two documents with id {doc.id!r}")
        seen.add(doc.id)
    return CorpusIndex(tuple(documents), params or Bm25Params())


def retrieve(index: CorpusIndex, query: str, k: int) -> list[tuple[Document, float]]:
    """Top-k documents by BM25, ties broken by ascending document id.

    Only documents sharing at least one token with the query are returned, so
    the list may be shorter than k.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    scored = []
    for position in index.candidate_positions(query):
        score = index.score(query, position)
        if score > 0.0:
            scored.append((index.documents[position], score))
    scored.sort(key=lambda pair: (-pair[1], pair[0].id))
    return scored[:k]


def load_corpus(path: str | Path) -> list[Document]:
    """Read a JSONL corpus with id, title, and body fields per line."""
    documents = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_number}: not valid JSON: {exc}") from exc
            for field in ("id", "title", "body"):
                if not isinstance(data.get(field), str):
                    raise ValueError(f"{path}:{line_number}: missing or non-string {field!r}")
            documents.append(Document(id=data["id"], title=data["title"], body=data["body"]))
    return documents


class CorpusRetriever:
    """Adapter giving an index the (query, k) -> [(title, body)] surface the rollout driver expects."""

    def __init__(self, index: CorpusIndex) -> None:
        self.index = index

    def retrieve(self, query: str, k: int) -> list[tuple[str, str]]:
        return [(doc.title, doc.body) for doc, _ in retrieve(self.index, query, k)]
