"""The two sentence/document classifiers: Naive Bayes and a linear soft-margin SVM.

Both operate on unigram-presence vectors and serve two roles: sentence-level
subjectivity detection and document-level polarity classification. Class 1 is
the class of interest (subjective, or positive). The SVM's signed geometric
distance to the hyperplane is clamped into [0, 1] to produce per-item score
pairs for the graph construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .features import PresenceVector, Vocabulary

FORMAT_TAG = "subjcut-model/1"


class TrainingError(Exception):
    """Training data cannot produce a usable model (e.g. one class only)."""


class DegenerateModelError(Exception):
    """A model whose decision function is undefined (zero weight vector)."""


class VocabularyMismatchError(Exception):
    """A serialized model was paired with a vocabulary it was not trained on."""


@dataclass(frozen=True)
class IndividualScores:
    """Per-item nonnegative preferences for class 1 and class 2.

    When produced from a classifier the pair sums to 1 per item, but the graph
    construction only needs nonnegativity.
    """

    class1: np.ndarray
    class2: np.ndarray

    def __post_init__(self) -> None:
        c1 = np.asarray(self.class1, dtype=float)
        c2 = np.asarray(self.class2, dtype=float)
        object.__setattr__(self, "class1", c1)
        object.__setattr__(self, "class2", c2)
        if c1.shape != c2.shape or c1.ndim != 1:
            raise ValueError("score arrays must be 1-d and equal length")
        if not (np.isfinite(c1).all() and np.isfinite(c2).all()):
            raise ValueError("scores must be finite")
        if (c1 < 0).any() or (c2 < 0).any():
            raise ValueError("scores must be nonnegative")

    def __len__(self) -> int:
        return len(self.class1)


# ---------------------------------------------------------------------------
# Naive Bayes


@dataclass(frozen=True)
class NaiveBayesModel:
    """Multinomial NB over binary presence features, add-alpha smoothed, log space."""

    log_prior: np.ndarray  # shape (2,)
    log_likelihood: np.ndarray  # shape (2, V)
    alpha: float
    vocab_digest: str = ""

    @property
    def vocab_size(self) -> int:
        return self.log_likelihood.shape[1]


def nb_train(
    vectors: Sequence[PresenceVector],
    labels: Sequence[int],
    vocab: Vocabulary,
    alpha: float = 1.0,
) -> NaiveBayesModel:
    """Train NB from presence vectors and 0/1 labels.

    The event model is multinomial over the presence features: each active
    index of a training vector counts as one draw for its class.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    y = np.asarray(labels, dtype=int)
    if len(vectors) != len(y):
        raise ValueError("vectors and labels differ in length")
    if set(np.unique(y)) != {0, 1}:
        raise TrainingError("training data must contain both classes")
    v_size = vocab.size
    counts = np.zeros((2, v_size), dtype=float)
    for vec, label in zip(vectors, y):
        if vec.active_indices:
            counts[label, list(vec.active_indices)] += 1.0
    class_counts = np.bincount(y, minlength=2).astype(float)
    log_prior = np.log(class_counts / class_counts.sum())
    if v_size == 0:
        log_likelihood = np.zeros((2, 0))  # prior-only model
    else:
        totals = counts.sum(axis=1, keepdims=True)
        log_likelihood = np.log(counts + alpha) - np.log(totals + alpha * v_size)
    return NaiveBayesModel(
        log_prior=log_prior,
        log_likelihood=log_likelihood,
        alpha=alpha,
        vocab_digest=vocab.digest(),
    )


def nb_predict_prob(model: NaiveBayesModel, vector: PresenceVector) -> float:
    """Posterior probability of class 1, normalized via log-sum-exp."""
    idx = list(vector.active_indices)
    joint = model.log_prior.copy()
    if idx:
        joint = joint + model.log_likelihood[:, idx].sum(axis=1)
    return float(np.exp(joint[1] - np.logaddexp(joint[0], joint[1])))


# ---------------------------------------------------------------------------
# Linear soft-margin SVM


@dataclass(frozen=True)
class LinearMarginModel:
    """Linear SVM: dense weights over the vocabulary plus an explicit bias."""

    weights: np.ndarray
    bias: float
    regularization: float
    training_seed: int
    vocab_digest: str = ""


def svm_train(
    vectors: Sequence[PresenceVector],
    labels: Sequence[int],
    vocab: Vocabulary,
    regularization: float = 1.0,
    seed: int = 0,
    max_epochs: int = 60,
    tol: float = 1e-3,
) -> LinearMarginModel:
    """Train a linear L1-loss SVM by dual coordinate descent.

    Solves min_w 0.5*(||w||^2 + b^2) + C * sum_i hinge(y_i, w.x_i + b), with
    the bias handled as an augmented unit feature. Coordinates are visited in
    seeded random permutations, so training is deterministic given
    (data, regularization, seed). Stops when the relative duality gap drops
    below ``tol`` or after ``max_epochs`` sweeps.

    The input vectors must be length-normalized (empty vectors are allowed and
    interact with the bias only).
    """
    if regularization <= 0:
        raise ValueError(f"regularization must be > 0, got {regularization}")
    y = np.asarray(labels, dtype=int)
    if len(vectors) != len(y):
        raise ValueError("vectors and labels differ in length")
    if set(np.unique(y)) != {0, 1}:
        raise TrainingError("training data must contain both classes")
    for vec in vectors:
        if vec.active_indices and not vec.normalized:
            raise ValueError("SVM training requires length-normalized vectors")

    n = len(vectors)
    c_penalty = float(regularization)
    signs = np.where(y == 1, 1.0, -1.0)
    rows = [np.asarray(v.active_indices, dtype=np.intp) for v in vectors]
    row_values = np.array([v.value_per_active for v in vectors])
    # Q_ii = ||x_i||^2 + 1 for the augmented bias coordinate.
    q_diag = np.array([len(r) for r in rows]) * row_values**2 + 1.0

    w = np.zeros(vocab.size)
    b = 0.0
    alpha = np.zeros(n)
    rng = np.random.default_rng(seed)

    def margins() -> np.ndarray:
        return signs * np.array(
            [row_values[i] * w[rows[i]].sum() + b for i in range(n)]
        )

    for _ in range(max_epochs):
        for i in rng.permutation(n):
            idx = rows[i]
            value = row_values[i]
            grad = signs[i] * (value * w[idx].sum() + b) - 1.0
            a_old = alpha[i]
            if a_old == 0.0:
                projected = min(grad, 0.0)
            elif a_old == c_penalty:
                projected = max(grad, 0.0)
            else:
                projected = grad
            if abs(projected) < 1e-12:
                continue
            a_new = min(max(a_old - grad / q_diag[i], 0.0), c_penalty)
            delta = a_new - a_old
            if delta != 0.0:
                w[idx] += delta * signs[i] * value
                b += delta * signs[i]
                alpha[i] = a_new
        reg_term = 0.5 * (w @ w + b * b)
        primal = reg_term + c_penalty * np.maximum(0.0, 1.0 - margins()).sum()
        dual = alpha.sum() - reg_term
        if primal - dual <= tol * max(primal, 1.0):
            break

    return LinearMarginModel(
        weights=w,
        bias=float(b),
        regularization=c_penalty,
        training_seed=seed,
        vocab_digest=vocab.digest(),
    )


def svm_decision(model: LinearMarginModel, vector: PresenceVector) -> float:
    """Signed geometric distance from the hyperplane; positive means class 1."""
    norm = float(np.linalg.norm(model.weights))
    if norm == 0.0:
        raise DegenerateModelError("zero weight vector has no decision boundary")
    idx = list(vector.active_indices)
    raw = model.bias + (vector.value_per_active * model.weights[idx].sum() if idx else 0.0)
    return float(raw / norm)


def svm_to_individual(d: float) -> tuple[float, float]:
    """Clamp a signed distance into a class-1 preference in [0, 1].

    Piecewise linear: 1 above +2, 0 below -2, (2 + d) / 4 between; the
    complement is returned as the class-2 preference.
    """
    if not np.isfinite(d):
        raise ValueError(f"decision value must be finite, got {d}")
    if d > 2.0:
        ind1 = 1.0
    elif d < -2.0:
        ind1 = 0.0
    else:
        ind1 = (2.0 + d) / 4.0
    return ind1, 1.0 - ind1


# ---------------------------------------------------------------------------
# Serialization


def save_model(model: NaiveBayesModel | LinearMarginModel, path: str | Path) -> None:
    if isinstance(model, NaiveBayesModel):
        payload = {
            "format": FORMAT_TAG,
            "kind": "nb",
            "vocab_digest": model.vocab_digest,
            "hyperparameters": {"alpha": model.alpha},
            "parameters": {
                "log_prior": model.log_prior.tolist(),
                "log_likelihood": model.log_likelihood.tolist(),
            },
        }
    elif isinstance(model, LinearMarginModel):
        payload = {
            "format": FORMAT_TAG,
            "kind": "svm",
            "vocab_digest": model.vocab_digest,
            "hyperparameters": {
                "regularization": model.regularization,
                "seed": model.training_seed,
            },
            "parameters": {"weights": model.weights.tolist(), "bias": model.bias},
        }
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_model(
    path: str | Path, vocab: Vocabulary | None = None
) -> NaiveBayesModel | LinearMarginModel:
    """Load a serialized model, refusing one trained on a different vocabulary."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != FORMAT_TAG:
        raise ValueError(f"{path}: unknown model format {payload.get('format')!r}")
    if vocab is not None and payload["vocab_digest"] != vocab.digest():
        raise VocabularyMismatchError(
            f"{path}: model was trained on a different vocabulary"
        )
    params = payload["parameters"]
    if payload["kind"] == "nb":
        return NaiveBayesModel(
            log_prior=np.asarray(params["log_prior"]),
            log_likelihood=np.asarray(params["log_likelihood"]),
            alpha=payload["hyperparameters"]["alpha"],
            vocab_digest=payload["vocab_digest"],
        )
    if payload["kind"] == "svm":
        return LinearMarginModel(
            weights=np.asarray(params["weights"]),
            bias=params["bias"],
            regularization=payload["hyperparameters"]["regularization"],
            training_seed=payload["hyperparameters"]["seed"],
            vocab_digest=payload["vocab_digest"],
        )
    raise ValueError(f"{path}: unknown model kind {payload['kind']!r}")
