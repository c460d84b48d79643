"""Experiment orchestration: cross-validated polarity runs, grids, sweeps, tests.

The detector is trained once on the full sentence corpus (it is disjoint from
the review corpus, and its sentences are never proximal, so per-fold
retraining would buy nothing). The polarity classifier, by contrast, is
retrained per fold on the extracts of the nine training folds only; each
fold's training inputs are digested into the report so leakage is auditable.
Reports carry no timestamps and serialize canonically: the same configuration
and seed reproduce the same bytes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import stats

from .classifiers import (
    IndividualScores,
    LinearMarginModel,
    NaiveBayesModel,
    nb_predict_prob,
    nb_train,
    svm_train,
)
from .corpus import POSITIVE, SUBJECTIVE, LabeledSentence, ReviewDocument, tokenize
from .extraction import (
    Detector,
    DetectorConfig,
    Extract,
    ProximityParams,
    build_extract,
    complement_indices,
    detect_paragraph_unit,
    individual_scores,
    preservation_rate,
    select_basic,
    select_graph,
    select_least_n,
    select_top_n,
)
from .features import (
    EmptyVocabularyError,
    PresenceVector,
    Vocabulary,
    build_vocabulary,
    featurize,
)

EXTRACTORS = (
    "full_review",
    "basic",
    "graph",
    "paragraph",
    "top_n",
    "first_n",
    "last_n",
    "least_n",
)
N_EXTRACTORS = ("top_n", "first_n", "last_n", "least_n")

SWEEP_CSV_FIELDS = ("method", "N", "classifier", "fold", "accuracy", "preservation")


@dataclass(frozen=True)
class ExperimentConfig:
    """One polarity experiment: how extracts are made and what classifies them."""

    extractor: str = "full_review"
    detector_base: str = "nb"
    classifier: str = "nb"
    n_sentences: int | None = None
    proximity: ProximityParams | None = None
    flipped: bool = False
    folds: int = 10
    seed: int = 0
    min_doc_freq: int = 1

    def __post_init__(self) -> None:
        if self.extractor not in EXTRACTORS:
            raise ValueError(f"unknown extractor {self.extractor!r}")
        if self.detector_base not in ("nb", "svm"):
            raise ValueError(f"detector_base must be nb or svm, got {self.detector_base!r}")
        if self.classifier not in ("nb", "svm"):
            raise ValueError(f"classifier must be nb or svm, got {self.classifier!r}")
        if self.extractor in N_EXTRACTORS and (self.n_sentences is None or self.n_sentences < 1):
            raise ValueError(f"extractor {self.extractor} requires n_sentences >= 1")
        if self.extractor == "graph" and self.proximity is None:
            raise ValueError("graph extractor requires proximity parameters")
        if self.folds < 2:
            raise ValueError(f"folds must be >= 2, got {self.folds}")

    def to_dict(self) -> dict:
        return {
            "extractor": self.extractor,
            "detector_base": self.detector_base,
            "classifier": self.classifier,
            "n_sentences": self.n_sentences,
            "proximity": self.proximity.to_dict() if self.proximity else None,
            "flipped": self.flipped,
            "folds": self.folds,
            "seed": self.seed,
            "min_doc_freq": self.min_doc_freq,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if d.get("proximity"):
            d["proximity"] = ProximityParams.from_dict(d["proximity"])
        return cls(**d)

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class FoldResult:
    fold: int
    accuracy: float
    n_test: int
    preservation: float
    train_digest: str

    def to_dict(self) -> dict:
        return {
            "fold": self.fold,
            "accuracy": self.accuracy,
            "n_test": self.n_test,
            "preservation": self.preservation,
            "train_digest": self.train_digest,
        }


@dataclass(frozen=True)
class ExperimentReport:
    """Per-fold accuracies plus their mean, keyed by the config digest."""

    config: dict
    config_digest: str
    folds: tuple[FoldResult, ...]
    mean_accuracy: float
    mean_preservation: float
    comparisons: tuple[dict, ...] = ()

    def fold_accuracies(self) -> list[float]:
        return [f.accuracy for f in self.folds]

    def to_json(self) -> str:
        payload = {
            "config": self.config,
            "config_digest": self.config_digest,
            "folds": [f.to_dict() for f in self.folds],
            "mean_accuracy": self.mean_accuracy,
            "mean_preservation": self.mean_preservation,
            "comparisons": list(self.comparisons),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        d = json.loads(text)
        return cls(
            config=d["config"],
            config_digest=d["config_digest"],
            folds=tuple(FoldResult(**f) for f in d["folds"]),
            mean_accuracy=d["mean_accuracy"],
            mean_preservation=d["mean_preservation"],
            comparisons=tuple(d["comparisons"]),
        )

    def render_text(self) -> str:
        cfg = self.config
        lines = [f"experiment {self.config_digest[:12]}"]
        parts = [f"extractor={cfg['extractor']}", f"classifier={cfg['classifier']}"]
        if cfg["extractor"] not in ("full_review", "first_n", "last_n"):
            parts.append(f"detector={cfg['detector_base']}")
        if cfg.get("n_sentences"):
            parts.append(f"N={cfg['n_sentences']}")
        if cfg.get("proximity"):
            p = cfg["proximity"]
            parts.append(
                f"proximity(T={p['threshold']}, {p['decay']}, c={p['strength']:g},"
                f" w={p['cross_paragraph_weight']:g})"
            )
        if cfg.get("flipped"):
            parts.append("flipped")
        lines.append("  " + " ".join(parts))
        lines.append(f"  {'fold':>4}  {'accuracy':>8}  {'n_test':>6}  {'preservation':>12}")
        for f in self.folds:
            lines.append(
                f"  {f.fold:>4}  {f.accuracy:>8.4f}  {f.n_test:>6}  {f.preservation:>12.4f}"
            )
        lines.append(f"  mean accuracy     {self.mean_accuracy:.4f}")
        lines.append(f"  mean preservation {self.mean_preservation:.4f}")
        for comp in self.comparisons:
            lines.append(
                f"  vs {comp['other_digest'][:12]}: t={comp['t']:+.4f} p={comp['p']:.6f}"
                + (" (zero-variance differences)" if comp.get("degenerate") else "")
            )
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Detector training and scoring


def train_detector_model(
    sentences: Sequence[LabeledSentence],
    base: str = "nb",
    alpha: float = 1.0,
    regularization: float = 1.0,
    seed: int = 0,
    min_doc_freq: int = 1,
) -> tuple[NaiveBayesModel | LinearMarginModel, Vocabulary]:
    """Train a subjectivity detector on the full sentence corpus."""
    texts = [tokenize(s.text) for s in sentences]
    labels = [1 if s.label == SUBJECTIVE else 0 for s in sentences]
    vocab = build_vocabulary(texts, min_doc_freq)
    if base == "nb":
        vectors = [featurize(t, vocab, normalize=False) for t in texts]
        return nb_train(vectors, labels, vocab, alpha=alpha), vocab
    if base == "svm":
        vectors = [featurize(t, vocab, normalize=True) for t in texts]
        return svm_train(vectors, labels, vocab, regularization=regularization, seed=seed), vocab
    raise ValueError(f"base must be nb or svm, got {base!r}")


def make_detector(
    sentences: Sequence[LabeledSentence],
    config: DetectorConfig,
    alpha: float = 1.0,
    regularization: float = 1.0,
    seed: int = 0,
    min_doc_freq: int = 1,
) -> Detector:
    model, vocab = train_detector_model(
        sentences,
        base=config.base,
        alpha=alpha,
        regularization=regularization,
        seed=seed,
        min_doc_freq=min_doc_freq,
    )
    return Detector(model=model, vocab=vocab, config=config)


def score_documents(
    model: NaiveBayesModel | LinearMarginModel,
    vocab: Vocabulary,
    documents: Sequence[ReviewDocument],
) -> list[IndividualScores]:
    """Per-sentence scores for every document, computed once and reused."""
    return [individual_scores(model, vocab, doc.sentences) for doc in documents]


def detector_cv_accuracies(
    sentences: Sequence[LabeledSentence],
    base: str = "nb",
    folds: int = 10,
    alpha: float = 1.0,
    regularization: float = 1.0,
    seed: int = 0,
    min_doc_freq: int = 1,
) -> list[float]:
    """Cross-validated sentence-classification accuracy of a detector base.

    Sentences get folds round-robin by position, which keeps the two label
    blocks of the distributed corpus balanced across folds.
    """
    texts = [tokenize(s.text) for s in sentences]
    labels = [1 if s.label == SUBJECTIVE else 0 for s in sentences]
    fold_of = [i % folds for i in range(len(sentences))]
    accuracies = []
    for fold in range(folds):
        train_idx = [i for i in range(len(sentences)) if fold_of[i] != fold]
        test_idx = [i for i in range(len(sentences)) if fold_of[i] == fold]
        vocab = build_vocabulary([texts[i] for i in train_idx], min_doc_freq)
        normalize = base == "svm"
        train_vecs = [featurize(texts[i], vocab, normalize) for i in train_idx]
        train_y = [labels[i] for i in train_idx]
        if base == "nb":
            model = nb_train(train_vecs, train_y, vocab, alpha=alpha)
        else:
            model = svm_train(train_vecs, train_y, vocab, regularization=regularization, seed=seed)
        predict = _make_predictor(model)
        correct = sum(
            predict(featurize(texts[i], vocab, normalize)) == labels[i] for i in test_idx
        )
        accuracies.append(correct / len(test_idx))
    return accuracies


def _make_predictor(model: NaiveBayesModel | LinearMarginModel) -> Callable[[PresenceVector], int]:
    if isinstance(model, NaiveBayesModel):
        return lambda vec: 1 if nb_predict_prob(model, vec) > 0.5 else 0
    weights, bias = model.weights, model.bias

    def predict(vec: PresenceVector) -> int:
        raw = bias
        if vec.active_indices:
            raw += vec.value_per_active * weights[list(vec.active_indices)].sum()
        return 1 if raw > 0 else 0

    return predict


# ---------------------------------------------------------------------------
# The main experiment


def _select_for_config(
    config: ExperimentConfig,
    doc: ReviewDocument,
    detector: Detector | None,
    scores: IndividualScores | None,
) -> tuple[int, ...]:
    n_sent = len(doc.sentences)
    if config.extractor == "full_review":
        selected: tuple[int, ...] = tuple(range(n_sent))
    elif config.extractor == "basic":
        selected = select_basic(scores)
    elif config.extractor == "graph":
        selected = select_graph(scores, config.proximity, doc.paragraph_starts)
    elif config.extractor == "paragraph":
        selected = detect_paragraph_unit(detector.model, detector.vocab, doc)
    elif config.extractor == "top_n":
        selected = select_top_n(scores, config.n_sentences)
    elif config.extractor == "least_n":
        selected = select_least_n(scores, config.n_sentences)
    elif config.extractor == "first_n":
        selected = tuple(range(min(config.n_sentences, n_sent)))
    else:  # last_n
        selected = tuple(range(max(0, n_sent - config.n_sentences), n_sent))
    if config.flipped:
        selected = complement_indices(doc, selected)
    return selected


def _needs_detector(config: ExperimentConfig) -> bool:
    return config.extractor in ("basic", "graph", "paragraph", "top_n", "least_n")


def make_extracts(
    config: ExperimentConfig,
    documents: Sequence[ReviewDocument],
    detector: Detector | None = None,
    scores: Sequence[IndividualScores] | None = None,
) -> list[Extract]:
    """Produce the per-document extracts an experiment will classify."""
    if _needs_detector(config):
        if detector is None:
            raise ValueError(f"extractor {config.extractor!r} requires a trained detector")
        if scores is None and config.extractor != "paragraph":
            scores = score_documents(detector.model, detector.vocab, documents)
    out = []
    for i, doc in enumerate(documents):
        doc_scores = scores[i] if scores is not None else None
        out.append(build_extract(doc, _select_for_config(config, doc, detector, doc_scores)))
    return out


def _vocabulary_for_training(token_lists: Sequence[list[str]], min_doc_freq: int) -> Vocabulary:
    # A fold whose training extracts are all empty (e.g. an aggressive
    # association setting labeled everything objective) degrades to an empty
    # vocabulary: the classifier then falls back to its prior or bias sign.
    try:
        return build_vocabulary(token_lists, min_doc_freq)
    except EmptyVocabularyError:
        return Vocabulary(token_to_index={})


def _train_digest(pairs: Sequence[tuple[str, str]]) -> str:
    h = hashlib.sha256()
    for doc_id, text in sorted(pairs):
        h.update(doc_id.encode("utf-8"))
        h.update(b"\x00")
        h.update(text.encode("utf-8"))
        h.update(b"\x01")
    return h.hexdigest()


def run_experiment(
    config: ExperimentConfig,
    documents: Sequence[ReviewDocument],
    detector: Detector | None = None,
    scores: Sequence[IndividualScores] | None = None,
) -> ExperimentReport:
    """Cross-validated polarity accuracy of a classifier over extracts.

    For each fold, the vocabulary and the polarity classifier are built from
    the training folds' extracts only; the held-out fold supplies the test
    extracts. ``scores`` may carry precomputed per-sentence detector scores
    aligned with ``documents`` (grid search reuses them across cells).
    """
    bad = [doc.id for doc in documents if not (0 <= doc.fold < config.folds)]
    if bad:
        raise ValueError(f"documents without a valid fold: {bad[:3]}")
    extracts = make_extracts(config, documents, detector, scores)
    labels = [1 if doc.label == POSITIVE else 0 for doc in documents]
    token_lists = [tokenize(e.text) for e in extracts]

    fold_results = []
    for fold in range(config.folds):
        train_idx = [i for i, doc in enumerate(documents) if doc.fold != fold]
        test_idx = [i for i, doc in enumerate(documents) if doc.fold == fold]
        if not test_idx:
            raise ValueError(f"fold {fold} is empty")
        vocab = _vocabulary_for_training(
            [token_lists[i] for i in train_idx], config.min_doc_freq
        )
        normalize = config.classifier == "svm"
        train_vecs = [featurize(token_lists[i], vocab, normalize) for i in train_idx]
        train_y = [labels[i] for i in train_idx]
        if config.classifier == "nb":
            model = nb_train(train_vecs, train_y, vocab)
        else:
            model = svm_train(train_vecs, train_y, vocab, seed=config.seed)
        predict = _make_predictor(model)
        correct = sum(
            predict(featurize(token_lists[i], vocab, normalize)) == labels[i]
            for i in test_idx
        )
        fold_results.append(
            FoldResult(
                fold=fold,
                accuracy=correct / len(test_idx),
                n_test=len(test_idx),
                preservation=preservation_rate([extracts[i] for i in test_idx]),
                train_digest=_train_digest(
                    [(documents[i].id, extracts[i].text) for i in train_idx]
                ),
            )
        )
    return ExperimentReport(
        config=config.to_dict(),
        config_digest=config.digest(),
        folds=tuple(fold_results),
        mean_accuracy=float(np.mean([f.accuracy for f in fold_results])),
        mean_preservation=float(np.mean([f.preservation for f in fold_results])),
    )


# ---------------------------------------------------------------------------
# Significance testing


class TTestResult(NamedTuple):
    t: float
    p: float
    degenerate: bool = False


def paired_t_test(acc_a: Sequence[float], acc_b: Sequence[float]) -> TTestResult:
    """Two-tailed paired t-test on fold-wise accuracy differences, df = n - 1.

    Identical inputs give (t=0, p=1). Nonzero but constant differences have
    zero variance; that degenerate case is reported as p=0 with a flag and an
    infinite statistic carrying the sign of the difference.
    """
    a = np.asarray(acc_a, dtype=float)
    b = np.asarray(acc_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired test needs two equal-length vectors")
    if len(a) < 2:
        raise ValueError("paired test needs at least 2 pairs")
    d = a - b
    if np.all(d == 0.0):
        return TTestResult(t=0.0, p=1.0)
    sd = d.std(ddof=1)
    if sd == 0.0:
        return TTestResult(t=math.copysign(math.inf, d.mean()), p=0.0, degenerate=True)
    t = d.mean() / (sd / math.sqrt(len(d)))
    p = 2.0 * stats.t.sf(abs(t), df=len(d) - 1)
    return TTestResult(t=float(t), p=float(p))


def add_comparison(report: ExperimentReport, other: ExperimentReport) -> ExperimentReport:
    """Attach a paired t-test against another report's fold accuracies."""
    result = paired_t_test(report.fold_accuracies(), other.fold_accuracies())
    entry = {
        "other_digest": other.config_digest,
        "t": result.t,
        "p": result.p,
        "degenerate": result.degenerate,
    }
    return replace(report, comparisons=report.comparisons + (entry,))


# ---------------------------------------------------------------------------
# Grid search over proximity parameters


def default_strength_grid() -> tuple[float, ...]:
    return tuple(round(i / 10, 1) for i in range(11))


@dataclass(frozen=True)
class GridSpec:
    thresholds: tuple[int, ...] = (1, 2, 3)
    decays: tuple[str, ...] = ("constant", "exponential", "inverse_square")
    strengths: tuple[float, ...] = ()
    cross_paragraph_weights: tuple[float, ...] = (1.0,)

    def __post_init__(self) -> None:
        if not self.strengths:
            object.__setattr__(self, "strengths", default_strength_grid())
        if not (self.thresholds and self.decays and self.cross_paragraph_weights):
            raise ValueError("grid axes must be nonempty")

    def cells(self) -> list[ProximityParams]:
        out = []
        for t in self.thresholds:
            for decay in self.decays:
                for c in self.strengths:
                    for w in self.cross_paragraph_weights:
                        out.append(
                            ProximityParams(
                                threshold=t,
                                decay=decay,
                                strength=c,
                                cross_paragraph_weight=w,
                            )
                        )
        return out


@dataclass(frozen=True)
class GridSearchResult:
    best: ExperimentReport
    cells: tuple[tuple[ProximityParams, ExperimentReport], ...]

    def to_csv(self) -> str:
        rows = []
        for params, report in self.cells:
            method = (
                f"graph_T{params.threshold}_{params.decay}"
                f"_c{params.strength:g}_w{params.cross_paragraph_weight:g}"
            )
            for f in report.folds:
                rows.append(
                    (method, "", report.config["classifier"], f.fold, f.accuracy, f.preservation)
                )
        return rows_to_csv(rows)


_WORKER_STATE: dict = {}


def _init_grid_worker(base_config, documents, detector, scores) -> None:
    _WORKER_STATE["args"] = (base_config, documents, detector, scores)


def _run_grid_cell(params: ProximityParams) -> ExperimentReport:
    base_config, documents, detector, scores = _WORKER_STATE["args"]
    config = replace(base_config, extractor="graph", proximity=params)
    return run_experiment(config, documents, detector, scores)


def grid_search(
    base_config: ExperimentConfig,
    documents: Sequence[ReviewDocument],
    detector: Detector,
    grid: GridSpec | None = None,
    max_workers: int = 1,
) -> GridSearchResult:
    """Evaluate every proximity setting; return all cells and the single best.

    Selection follows the protocol of reporting the best single setting by
    mean accuracy over all folds (an oracle-style choice, flagged as such in
    downstream reporting). Ties break toward the earlier cell in grid order.
    Per-sentence detector scores are computed once and shared by every cell.
    """
    grid = grid or GridSpec()
    scores = score_documents(detector.model, detector.vocab, documents)
    cells = grid.cells()
    if max_workers > 1:
        with ProcessPoolExecutor(
            max_workers=max_workers,
            initializer=_init_grid_worker,
            initargs=(base_config, list(documents), detector, scores),
        ) as pool:
            reports = list(pool.map(_run_grid_cell, cells))
    else:
        _init_grid_worker(base_config, list(documents), detector, scores)
        reports = [_run_grid_cell(p) for p in cells]
        _WORKER_STATE.clear()
    best = max(zip(cells, reports), key=lambda pair: pair[1].mean_accuracy)[1]
    return GridSearchResult(best=best, cells=tuple(zip(cells, reports)))


# ---------------------------------------------------------------------------
# N-sentence sweep and paragraph comparison


def n_sentence_sweep(
    documents: Sequence[ReviewDocument],
    detector: Detector,
    methods: Sequence[str] = N_EXTRACTORS,
    n_values: Sequence[int] = tuple(range(1, 41)),
    classifiers: Sequence[str] = ("nb",),
    base_config: ExperimentConfig | None = None,
) -> dict[tuple[str, int, str], ExperimentReport]:
    """Accuracy of each length-limited extraction method at each N."""
    for m in methods:
        if m not in N_EXTRACTORS:
            raise ValueError(f"unknown sweep method {m!r}")
    base = base_config or ExperimentConfig()
    scores = score_documents(detector.model, detector.vocab, documents)
    out = {}
    for method in methods:
        for n in n_values:
            for clf in classifiers:
                config = replace(
                    base, extractor=method, n_sentences=n, classifier=clf,
                    detector_base=detector.config.base,
                )
                out[(method, n, clf)] = run_experiment(config, documents, detector, scores)
    return out


def sweep_to_csv(results: dict[tuple[str, int, str], ExperimentReport]) -> str:
    rows = []
    for (method, n, clf) in sorted(results):
        for f in results[(method, n, clf)].folds:
            rows.append((method, n, clf, f.fold, f.accuracy, f.preservation))
    return rows_to_csv(rows)


def rows_to_csv(rows: Sequence[tuple]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_CSV_FIELDS)
    writer.writerows(rows)
    return buf.getvalue()


@dataclass(frozen=True)
class ParagraphComparison:
    """Graph detector with paragraph attenuation vs paragraph-unit detection."""

    graph_best: dict[str, ExperimentReport]  # keyed by polarity classifier
    paragraph_unit: dict[str, ExperimentReport]
    tests: dict[str, TTestResult]


def paragraph_comparison(
    documents: Sequence[ReviewDocument],
    detector: Detector,
    grid: GridSpec | None = None,
    classifiers: Sequence[str] = ("nb", "svm"),
    base_config: ExperimentConfig | None = None,
    max_workers: int = 1,
) -> ParagraphComparison:
    """Compare the two ways of using paragraph boundaries, per classifier.

    The graph side searches the proximity grid (including the cross-paragraph
    weights); the baseline runs the same classifier base with paragraphs as
    the unit of labeling.
    """
    grid = grid or GridSpec(cross_paragraph_weights=(0.0, 0.25, 0.5, 0.75, 1.0))
    base = base_config or ExperimentConfig()
    base = replace(base, detector_base=detector.config.base)
    graph_best, paragraph_unit, tests = {}, {}, {}
    paragraph_detector = Detector(
        model=detector.model,
        vocab=detector.vocab,
        config=DetectorConfig(base=detector.config.base, mode="basic", unit="paragraph"),
    )
    for clf in classifiers:
        clf_base = replace(base, classifier=clf)
        result = grid_search(clf_base, documents, detector, grid, max_workers=max_workers)
        graph_best[clf] = result.best
        unit_config = replace(clf_base, extractor="paragraph")
        paragraph_unit[clf] = run_experiment(unit_config, documents, paragraph_detector)
        tests[clf] = paired_t_test(
            graph_best[clf].fold_accuracies(), paragraph_unit[clf].fold_accuracies()
        )
    return ParagraphComparison(graph_best=graph_best, paragraph_unit=paragraph_unit, tests=tests)
