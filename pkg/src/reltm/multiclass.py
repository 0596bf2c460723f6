"""One-vs-rest composition of binary clause banks with argmax voting."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from . import _kernels
from .automata import init_bank, to_literals
from .convolution import pad_windows


def _as_padded(X, include_negated):
    """Normalize input to (Xpad, wcounts) uint8 literal windows.

    Accepts a 2D array of plain samples, a list of per-sample window
    matrices, or a ready (Xpad, wcounts) pair.
    """
    if isinstance(X, tuple):
        Xpad, wcounts = X
        return np.asarray(Xpad, dtype=np.uint8), np.asarray(wcounts, dtype=np.int64)
    if isinstance(X, np.ndarray) and X.ndim == 2:
        lits = to_literals(X, include_negated)
        return lits[:, None, :], np.ones(lits.shape[0], dtype=np.int64)
    return pad_windows([to_literals(w, include_negated) for w in X])


def predict_multiclass(vote_rows):
    """Argmax over per-class vote sums; ties go to the lowest class index."""
    return np.argmax(vote_rows, axis=-1)


class MultiClassTsetlinMachine(ClassifierMixin, BaseEstimator):
    """k-class Tsetlin machine: one clause bank per class, shared feature space.

    Each training step updates the true class's bank with target 1 and
    one uniformly sampled other bank with target 0.  Input may be plain
    binary vectors or per-sample window sets (convolutional evaluation:
    a clause fires if any window satisfies it).

    ``n_clauses`` is the clause budget per class bank.
    """

    def __init__(self, n_clauses=200, threshold=15, s=3.0, n_states=100,
                 epochs=100, boost_true_positive=False, include_negated=True,
                 random_state=None):
        self.n_clauses = n_clauses
        self.threshold = threshold
        self.s = s
        self.n_states = n_states
        self.epochs = epochs
        self.boost_true_positive = boost_true_positive
        self.include_negated = include_negated
        self.random_state = random_state

    def fit(self, X, y):
        if self.n_clauses < 2 or self.n_clauses % 2:
            raise ValueError("n_clauses must be even and >= 2")
        if self.s <= 1.0:
            raise ValueError("s must be > 1")
        y = np.asarray(y)
        if y.shape[0] == 0:
            raise ValueError("empty training set")
        Xpad, wcounts = _as_padded(X, self.include_negated)
        self.classes_ = np.unique(y)
        if self.classes_.shape[0] < 2:
            raise ValueError("need at least 2 classes")
        codes = np.searchsorted(self.classes_, y).astype(np.int64)
        rng = np.random.default_rng(self.random_state)
        self.n_literals_ = Xpad.shape[2]
        self.state_ = np.stack([
            init_bank(self.n_clauses, self.n_literals_, self.n_states, rng)
            for _ in range(self.classes_.shape[0])
        ])
        _kernels.fit_multiclass(
            self.state_, Xpad, wcounts, codes, self.epochs,
            self.n_states, self.threshold, self.s, self.boost_true_positive, rng,
        )
        return self

    def vote_sums(self, X):
        Xpad, wcounts = _as_padded(X, self.include_negated)
        if Xpad.shape[2] != self.n_literals_:
            raise ValueError(
                f"feature width {Xpad.shape[2]} != fitted width {self.n_literals_}"
            )
        return _kernels.vote_sums_dataset(self.state_, Xpad, wcounts, self.n_states)

    def predict(self, X):
        return self.classes_[predict_multiclass(self.vote_sums(X))]


def evaluate(y_true, y_pred, labels=None):
    """Accuracy, macro/micro F-score and per-class confusion counts.

    ``confusion[i, j]`` counts samples of class ``labels[i]`` predicted
    as ``labels[j]``.
    """
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape[0] == 0:
        raise ValueError("empty evaluation set")
    if labels is None:
        labels = np.unique(np.concatenate([y_true, y_pred]))
    labels = np.asarray(labels)
    k = labels.shape[0]
    confusion = np.zeros((k, k), dtype=np.int64)
    ti = np.searchsorted(labels, y_true)
    pi = np.searchsorted(labels, y_pred)
    np.add.at(confusion, (ti, pi), 1)

    tp = np.diag(confusion).astype(float)
    support = confusion.sum(axis=1).astype(float)
    predicted = confusion.sum(axis=0).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(predicted > 0, tp / predicted, 0.0)
        recall = np.where(support > 0, tp / support, 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2 * precision * recall / pr, 0.0)
    accuracy = float(tp.sum() / confusion.sum())
    micro_tp = tp.sum()
    f_micro = float(2 * micro_tp / (predicted.sum() + support.sum()))
    return {
        "accuracy": accuracy,
        "f_macro": float(f1.mean()),
        "f_micro": f_micro,
        "labels": labels,
        "confusion": confusion,
    }
