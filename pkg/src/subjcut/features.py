"""Vocabularies and unigram-presence feature vectors.

A feature vector records only which vocabulary tokens occur in a text; the
value of every active coordinate is 1, or 1/sqrt(#active) when the vector is
length-normalized for margin classifiers. There is no tf, idf, or n-gram
machinery here on purpose.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class EmptyVocabularyError(Exception):
    """No tokens survived vocabulary construction."""


@dataclass(frozen=True)
class Vocabulary:
    """Token-to-dense-index mapping, ordered by first occurrence in training text."""

    token_to_index: Mapping[str, int]

    @property
    def size(self) -> int:
        return len(self.token_to_index)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_index

    def serialize(self) -> str:
        by_index = sorted(self.token_to_index.items(), key=lambda kv: kv[1])
        return "".join(f"{token}\t{index}\n" for token, index in by_index)

    def digest(self) -> str:
        return hashlib.sha256(self.serialize().encode("utf-8")).hexdigest()

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.serialize(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        mapping: dict[str, int] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            token, _, index = line.rpartition("\t")
            mapping[token] = int(index)
        got = sorted(mapping.values())
        if got != list(range(len(mapping))):
            raise ValueError(f"{path}: vocabulary indices are not dense")
        return cls(token_to_index=mapping)


def build_vocabulary(texts: Sequence[Iterable[str]], min_doc_freq: int = 1) -> Vocabulary:
    """Build a vocabulary from tokenized texts.

    Keeps every token appearing in at least ``min_doc_freq`` texts; indices
    follow first occurrence across the corpus, so construction is
    deterministic for a fixed input order.
    """
    if min_doc_freq < 1:
        raise ValueError(f"min_doc_freq must be >= 1, got {min_doc_freq}")
    if not texts:
        raise EmptyVocabularyError("no texts supplied")
    doc_freq: dict[str, int] = {}
    first_seen: list[str] = []
    for text in texts:
        for token in dict.fromkeys(text):  # de-duplicate, keep order
            if token not in doc_freq:
                first_seen.append(token)
            doc_freq[token] = doc_freq.get(token, 0) + 1
    kept = [t for t in first_seen if doc_freq[t] >= min_doc_freq]
    if not kept:
        raise EmptyVocabularyError("vocabulary is empty after frequency cutoff")
    return Vocabulary(token_to_index={t: i for i, t in enumerate(kept)})


@dataclass(frozen=True)
class PresenceVector:
    """Sparse binary presence vector: sorted active indices, one shared value."""

    active_indices: tuple[int, ...]
    value_per_active: float
    normalized: bool

    def __len__(self) -> int:
        return len(self.active_indices)

    @property
    def norm(self) -> float:
        return self.value_per_active * math.sqrt(len(self.active_indices))


def featurize(tokens: Iterable[str], vocab: Vocabulary, normalize: bool = False) -> PresenceVector:
    """Map tokens to a presence vector over ``vocab``.

    Repeated tokens contribute once; out-of-vocabulary tokens are dropped.
    With ``normalize`` the vector has unit Euclidean norm (empty input stays
    the zero vector).
    """
    mapping = vocab.token_to_index
    active = sorted({mapping[t] for t in tokens if t in mapping})
    if normalize and active:
        value = 1.0 / math.sqrt(len(active))
    else:
        value = 1.0
    return PresenceVector(
        active_indices=tuple(active), value_per_active=value, normalized=normalize
    )
