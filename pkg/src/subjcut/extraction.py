"""Turning per-sentence scores into extracts.

A detector scores each sentence of a review for subjectivity and selects a
subset: independently per sentence (basic), jointly via a minimum cut with
proximity edges (graph), or per paragraph. Positional and score-ranked
baselines (first/last/top/least N sentences) and the complement (objective)
extract live here too.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .classifiers import (
    IndividualScores,
    LinearMarginModel,
    NaiveBayesModel,
    nb_predict_prob,
    svm_decision,
    svm_to_individual,
)
from .corpus import ReviewDocument, tokenize
from .features import Vocabulary, featurize
from .mincut import DEFAULT_SCALE, AssociationScores, build_network, min_cut

DECAY_NAMES = ("constant", "exponential", "inverse_square")


def _decay(name: str, distance: int) -> float:
    if name == "constant":
        return 1.0
    if name == "exponential":
        return math.exp(1 - distance)
    if name == "inverse_square":
        return 1.0 / (distance * distance)
    raise ValueError(f"unknown decay {name!r}")


@dataclass(frozen=True)
class ProximityParams:
    """Association-edge controls.

    ``threshold`` is the maximum sentence distance still considered proximal,
    ``decay`` how influence falls off with distance, ``strength`` the overall
    weight of association relative to per-sentence scores, and
    ``cross_paragraph_weight`` an attenuation in [0, 1] applied to pairs that
    straddle a paragraph boundary (1 = no attenuation).
    """

    threshold: int = 1
    decay: str = "constant"
    strength: float = 0.0
    cross_paragraph_weight: float = 1.0

    def __post_init__(self) -> None:
        if self.threshold < 1 or self.threshold != int(self.threshold):
            raise ValueError(f"threshold must be a positive integer, got {self.threshold}")
        if self.decay not in DECAY_NAMES:
            raise ValueError(f"decay must be one of {DECAY_NAMES}, got {self.decay!r}")
        if not (self.strength >= 0):
            raise ValueError(f"strength must be >= 0, got {self.strength}")
        if not (0.0 <= self.cross_paragraph_weight <= 1.0):
            raise ValueError(
                f"cross_paragraph_weight must be in [0, 1], got {self.cross_paragraph_weight}"
            )

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "decay": self.decay,
            "strength": self.strength,
            "cross_paragraph_weight": self.cross_paragraph_weight,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProximityParams":
        return cls(**d)


def assoc_scores(
    num_sentences: int,
    params: ProximityParams,
    paragraph_starts: Sequence[int] | None = None,
) -> AssociationScores:
    """Association score for each sentence pair within the distance threshold.

    Pairs in different paragraphs are additionally multiplied by the
    cross-paragraph weight. Zero-valued pairs are omitted.
    """
    by_distance = [
        _decay(params.decay, d) * params.strength for d in range(1, params.threshold + 1)
    ]
    paragraph_of = None
    if paragraph_starts and len(paragraph_starts) > 1:
        starts = list(paragraph_starts)
        paragraph_of = [
            bisect.bisect_right(starts, i) - 1 for i in range(num_sentences)
        ]
    pairs: dict[tuple[int, int], float] = {}
    for i in range(num_sentences):
        for distance in range(1, params.threshold + 1):
            j = i + distance
            if j >= num_sentences:
                break
            value = by_distance[distance - 1]
            if paragraph_of is not None and paragraph_of[i] != paragraph_of[j]:
                value *= params.cross_paragraph_weight
            if value > 0.0:
                pairs[(i, j)] = value
    return AssociationScores(pairs=pairs)


def individual_scores(
    model: NaiveBayesModel | LinearMarginModel,
    vocab: Vocabulary,
    sentences: Iterable[str],
) -> IndividualScores:
    """Per-sentence class preferences from a trained sentence classifier.

    NB yields (posterior, 1 - posterior); the margin classifier's signed
    distance is clamped into [0, 1] and complemented.
    """
    class1 = []
    if isinstance(model, NaiveBayesModel):
        for text in sentences:
            vec = featurize(tokenize(text), vocab, normalize=False)
            class1.append(nb_predict_prob(model, vec))
    elif isinstance(model, LinearMarginModel):
        for text in sentences:
            vec = featurize(tokenize(text), vocab, normalize=True)
            class1.append(svm_to_individual(svm_decision(model, vec))[0])
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    c1 = np.asarray(class1, dtype=float)
    return IndividualScores(class1=c1, class2=1.0 - c1)


@dataclass(frozen=True)
class DetectorConfig:
    """Which detector to run: classifier base, decision mode, and unit."""

    base: str = "nb"  # nb | svm
    mode: str = "basic"  # basic | graph
    proximity: ProximityParams | None = None
    unit: str = "sentence"  # sentence | paragraph

    def __post_init__(self) -> None:
        if self.base not in ("nb", "svm"):
            raise ValueError(f"base must be nb or svm, got {self.base!r}")
        if self.mode not in ("basic", "graph"):
            raise ValueError(f"mode must be basic or graph, got {self.mode!r}")
        if self.unit not in ("sentence", "paragraph"):
            raise ValueError(f"unit must be sentence or paragraph, got {self.unit!r}")
        if self.mode == "graph" and self.proximity is None:
            raise ValueError("graph mode requires proximity parameters")
        if self.unit == "paragraph" and self.mode != "basic":
            raise ValueError("paragraph unit is only valid in basic mode")


@dataclass(frozen=True)
class Detector:
    """A trained sentence classifier plus the configuration for applying it."""

    model: NaiveBayesModel | LinearMarginModel
    vocab: Vocabulary
    config: DetectorConfig

    def scores(self, doc: ReviewDocument) -> IndividualScores:
        return individual_scores(self.model, self.vocab, doc.sentences)

    def select(self, doc: ReviewDocument, scores: IndividualScores | None = None) -> tuple[int, ...]:
        """Indices of the sentences the detector keeps, in document order."""
        if self.config.unit == "paragraph":
            return detect_paragraph_unit(self.model, self.vocab, doc)
        if scores is None:
            scores = self.scores(doc)
        if self.config.mode == "graph":
            return select_graph(scores, self.config.proximity, doc.paragraph_starts)
        return select_basic(scores)


def select_basic(scores: IndividualScores) -> tuple[int, ...]:
    """Independent per-sentence decisions: keep iff class-1 score strictly wins.

    A tie drops the sentence, matching the canonical min-cut rule, so basic
    selection and zero-association graph selection agree exactly.
    """
    return tuple(i for i in range(len(scores)) if scores.class1[i] > scores.class2[i])


def select_graph(
    scores: IndividualScores,
    params: ProximityParams,
    paragraph_starts: Sequence[int] | None = None,
    scale_factor: int = DEFAULT_SCALE,
) -> tuple[int, ...]:
    """Joint labeling of all sentences as the minimum cut of the score graph."""
    assoc = assoc_scores(len(scores), params, paragraph_starts)
    return min_cut(build_network(scores, assoc, scale_factor)).source_side


def detect_basic(detector: Detector, doc: ReviewDocument) -> tuple[int, ...]:
    return select_basic(detector.scores(doc))


def detect_graph(detector: Detector, doc: ReviewDocument) -> tuple[int, ...]:
    if detector.config.proximity is None:
        raise ValueError("detector has no proximity parameters")
    return select_graph(detector.scores(doc), detector.config.proximity, doc.paragraph_starts)


def detect_paragraph_unit(
    model: NaiveBayesModel | LinearMarginModel,
    vocab: Vocabulary,
    doc: ReviewDocument,
) -> tuple[int, ...]:
    """Classify whole paragraphs; every sentence inherits its paragraph's label.

    Documents without boundary information are treated as one paragraph, which
    makes the decision all-or-nothing.
    """
    starts = list(doc.paragraph_starts)
    spans = list(zip(starts, starts[1:] + [len(doc.sentences)]))
    texts = [" ".join(doc.sentences[a:b]) for a, b in spans]
    scores = individual_scores(model, vocab, texts)
    selected: list[int] = []
    for (a, b), keep in zip(spans, scores.class1 > scores.class2):
        if keep:
            selected.extend(range(a, b))
    return tuple(selected)


# ---------------------------------------------------------------------------
# Extracts


@dataclass(frozen=True)
class Extract:
    """The selected sentences of one document, in original order."""

    doc_id: str
    selected: tuple[int, ...]
    text: str
    words_kept: int
    words_total: int

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "selected": list(self.selected),
            "words_kept": self.words_kept,
            "words_total": self.words_total,
        }


def build_extract(doc: ReviewDocument, selected: Iterable[int]) -> Extract:
    indices = tuple(sorted(set(selected)))
    if indices and (indices[0] < 0 or indices[-1] >= len(doc.sentences)):
        raise ValueError(f"selection out of range for document {doc.id}")
    kept = [doc.sentences[i] for i in indices]
    return Extract(
        doc_id=doc.id,
        selected=indices,
        text="\n".join(kept),
        words_kept=sum(len(s.split()) for s in kept),
        words_total=doc.word_count,
    )


def complement_indices(doc: ReviewDocument, selected: Iterable[int]) -> tuple[int, ...]:
    chosen = set(selected)
    return tuple(i for i in range(len(doc.sentences)) if i not in chosen)


def extract_objective(doc: ReviewDocument, selected: Iterable[int]) -> Extract:
    """The flip side of a subjective extract: everything the detector discarded."""
    return build_extract(doc, complement_indices(doc, selected))


def select_top_n(scores: IndividualScores, n: int) -> tuple[int, ...]:
    """The n sentences with the highest class-1 score, regardless of whether
    they clear 0.5; ties go to the earlier sentence. Short documents return
    everything. Output is in document order."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    order = sorted(range(len(scores)), key=lambda i: (-scores.class1[i], i))
    return tuple(sorted(order[:n]))


def select_least_n(scores: IndividualScores, n: int) -> tuple[int, ...]:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    order = sorted(range(len(scores)), key=lambda i: (scores.class1[i], i))
    return tuple(sorted(order[:n]))


def extract_top_n(doc: ReviewDocument, scores: IndividualScores, n: int) -> Extract:
    return build_extract(doc, select_top_n(scores, n))

def extract_least_n(doc: ReviewDocument, scores: IndividualScores, n: int) -> Extract:
    return build_extract(doc, select_least_n(scores, n))

def extract_first_n(doc: ReviewDocument, n: int) -> Extract:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return build_extract(doc, range(min(n, len(doc.sentences))))

def extract_last_n(doc: ReviewDocument, n: int) -> Extract:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return build_extract(doc, range(max(0, len(doc.sentences) - n), len(doc.sentences)))


def preservation_rate(extracts: Sequence[Extract]) -> float:
    """Mean fraction of source words kept, over documents."""
    if not extracts:
        raise ValueError("no extracts")
    return float(np.mean([e.words_kept / e.words_total for e in extracts]))


def extracts_to_jsonl(extracts: Iterable[Extract]) -> str:
    return "".join(json.dumps(e.to_dict(), sort_keys=True) + "\n" for e in extracts)
