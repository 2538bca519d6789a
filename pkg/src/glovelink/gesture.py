"""Gesture classifier: a small from-scratch MLP plus the sliding-window
prediction stabilizer.

The production network is 147-40-25-5 (ReLU hidden layers, softmax output)
trained with mini-batch gradient descent on cross-entropy. The estimator
follows the fit/predict convention so it composes with the wider ecosystem.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .handmodel import GestureLabel, LabeledSample, N_FEATURES
from .validation import check_feature_matrix, check_labels

__all__ = [
    "GestureMlp",
    "TrainConfig",
    "PredictionWindow",
    "EvalReport",
    "EmptyClassError",
    "NonFiniteError",
    "EmptyTestSetError",
    "WINDOW_LENGTH",
    "train",
    "evaluate",
    "forward",
    "loss_and_grads",
    "init_params",
]

N_CLASSES = 5
WINDOW_LENGTH = 7
DEFAULT_HIDDEN = (40, 25)


class EmptyClassError(ValueError):
    """Training data is missing at least one gesture class."""


class NonFiniteError(RuntimeError):
    """Training loss diverged to a non-finite value."""


class EmptyTestSetError(ValueError):
    """Evaluation requires a non-empty test set."""


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 100
    batch_size: int = 64
    learning_rate: float = 0.01
    seed: int = 0
    tol: float = 1e-6

    def __post_init__(self):
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")


# --- functional core (also used by the finite-difference gradient tests) ---

def init_params(dims: list[int], rng: np.random.Generator):
    """He-initialized weights; weights[i] has shape (dims[i+1], dims[i])."""
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        scale = np.sqrt(2.0 / fan_in)
        weights.append(rng.normal(0.0, scale, (fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(weights, biases, X: np.ndarray):
    """Return (activations per layer, softmax probabilities)."""
    acts = [X]
    a = X
    for W, b in zip(weights[:-1], biases[:-1]):
        a = np.maximum(0.0, a @ W.T + b)
        acts.append(a)
    probs = _softmax(a @ weights[-1].T + biases[-1])
    return acts, probs


def loss_and_grads(weights, biases, X: np.ndarray, Y: np.ndarray):
    """Mean cross-entropy and its gradients w.r.t. every weight and bias.

    Y is one-hot, shape (n, n_classes).
    """
    n = X.shape[0]
    acts, probs = forward(weights, biases, X)
    loss = -np.mean(np.sum(Y * np.log(np.clip(probs, 1e-300, None)), axis=1))
    delta = (probs - Y) / n
    grads_w, grads_b = [], []
    for i in range(len(weights) - 1, -1, -1):
        grads_w.append(delta.T @ acts[i])
        grads_b.append(delta.sum(axis=0))
        if i > 0:
            delta = (delta @ weights[i]) * (acts[i] > 0.0)
    return loss, grads_w[::-1], grads_b[::-1]


# --- estimator ---

class GestureMlp:
    """Multilayer perceptron gesture classifier (fit/predict style).

    Parameters mirror the training configuration; `fit` is deterministic
    for a fixed seed. Weights are frozen after fitting.
    """

    def __init__(self, hidden=DEFAULT_HIDDEN, max_epochs=100, batch_size=64,
                 learning_rate=0.01, seed=0, tol=1e-6, n_classes=N_CLASSES):
        self.hidden = tuple(hidden)
        self.max_epochs = max_epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.seed = seed
        self.tol = tol
        self.n_classes = n_classes

    def get_params(self, deep=True):
        return {
            "hidden": self.hidden,
            "max_epochs": self.max_epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
            "tol": self.tol,
            "n_classes": self.n_classes,
        }

    def set_params(self, **params):
        for k, v in params.items():
            if k not in self.get_params():
                raise ValueError(f"unknown parameter {k!r}")
            setattr(self, k, v)
        return self

    @property
    def dims_(self) -> list[int]:
        return [self.n_features_in_, *self.hidden, self.n_classes]

    def fit(self, X, y):
        X = check_feature_matrix(X)
        y = check_labels(y, self.n_classes)
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y length mismatch")
        present = np.unique(y)
        if len(present) < self.n_classes:
            missing = sorted(set(range(self.n_classes)) - set(present.tolist()))
            raise EmptyClassError(f"classes with no samples: {missing}")
        self.n_features_in_ = X.shape[1]

        rng = np.random.default_rng(self.seed)
        weights, biases = init_params(self.dims_, rng)
        Y = np.eye(self.n_classes)[y]
        n = X.shape[0]
        prev_loss = np.inf
        self.loss_curve_ = []
        for epoch in range(self.max_epochs):
            order = rng.permutation(n)
            epoch_loss = 0.0
            for start in range(0, n, self.batch_size):
                idx = order[start : start + self.batch_size]
                loss, gw, gb = loss_and_grads(weights, biases, X[idx], Y[idx])
                if not np.isfinite(loss):
                    raise NonFiniteError(f"loss diverged at epoch {epoch}")
                epoch_loss += loss * len(idx)
                for W, b, dW, db in zip(weights, biases, gw, gb):
                    W -= self.learning_rate * dW
                    b -= self.learning_rate * db
            epoch_loss /= n
            self.loss_curve_.append(epoch_loss)
            if abs(prev_loss - epoch_loss) < self.tol:
                break
            prev_loss = epoch_loss
        self.weights_ = weights
        self.biases_ = biases
        self.n_epochs_ = len(self.loss_curve_)
        return self

    def _check_fitted(self):
        if not hasattr(self, "weights_"):
            raise RuntimeError("model is not fitted")

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        X = check_feature_matrix(X, self.n_features_in_)
        _, probs = forward(self.weights_, self.biases_, X)
        return probs

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def score(self, X, y) -> float:
        y = check_labels(y, self.n_classes)
        return float(np.mean(self.predict(X) == y))


def train(data: list[LabeledSample], cfg: TrainConfig = TrainConfig()) -> GestureMlp:
    """Train the fixed-architecture gesture model on labeled samples."""
    X = np.stack([s.features for s in data])
    y = np.array([int(s.label) for s in data])
    model = GestureMlp(max_epochs=cfg.max_epochs, batch_size=cfg.batch_size,
                       learning_rate=cfg.learning_rate, seed=cfg.seed, tol=cfg.tol)
    return model.fit(X, y)


# --- sliding-window stabilizer ---

class PredictionWindow:
    """Majority vote over the last 7 per-frame predictions.

    Each push converts the probability vector to a one-hot row (argmax),
    evicts the oldest row, and returns the label with the highest column
    sum. Ties break towards the lowest label index, so a fresh all-zero
    window yields NONE.
    """

    def __init__(self, length: int = WINDOW_LENGTH, n_classes: int = N_CLASSES):
        self.length = length
        self.n_classes = n_classes
        self._rows = deque(
            (np.zeros(n_classes) for _ in range(length)), maxlen=length
        )
        self._sums = np.zeros(n_classes)

    def push(self, probs) -> GestureLabel:
        probs = np.asarray(probs, dtype=np.float64)
        if probs.shape != (self.n_classes,):
            raise ValueError(f"expected {self.n_classes} probabilities")
        row = np.zeros(self.n_classes)
        row[int(np.argmax(probs))] = 1.0
        self._sums -= self._rows[0]
        self._rows.append(row)
        self._sums += row
        return GestureLabel(int(np.argmax(self._sums)))

    @property
    def column_sums(self) -> np.ndarray:
        return self._sums.copy()


def window_push(w: PredictionWindow, probs) -> GestureLabel:
    return w.push(probs)


# --- evaluation ---

@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    f1_weighted: float
    recall_weighted: float
    confusion: np.ndarray  # (n_classes, n_classes), rows = true label
    mean_ms: float
    std_ms: float

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "f1_weighted": self.f1_weighted,
            "recall_weighted": self.recall_weighted,
            "confusion": self.confusion.tolist(),
            "mean_ms": self.mean_ms,
            "std_ms": self.std_ms,
        }


def _weighted_metrics(confusion: np.ndarray) -> tuple[float, float, float]:
    support = confusion.sum(axis=1)
    total = confusion.sum()
    accuracy = float(np.trace(confusion) / total)
    f1s, recalls = [], []
    for c in range(confusion.shape[0]):
        tp = confusion[c, c]
        fn = support[c] - tp
        fp = confusion[:, c].sum() - tp
        recall = tp / support[c] if support[c] else 0.0
        precision = tp / (tp + fp) if (tp + fp) else 0.0
        f1 = (2 * precision * recall / (precision + recall)
              if (precision + recall) else 0.0)
        recalls.append(recall)
        f1s.append(f1)
    w = support / total
    return accuracy, float(np.dot(w, f1s)), float(np.dot(w, recalls))


def evaluate(model: GestureMlp, test: list[LabeledSample],
             timing_trials: int = 1000) -> EvalReport:
    """Confusion-matrix metrics plus single-sample inference timing."""
    if not test:
        raise EmptyTestSetError("empty test set")
    X = np.stack([s.features for s in test])
    y = np.array([int(s.label) for s in test])
    pred = model.predict(X)
    n = model.n_classes
    confusion = np.zeros((n, n), dtype=np.int64)
    np.add.at(confusion, (y, pred), 1)
    accuracy, f1w, recw = _weighted_metrics(confusion)

    times = []
    for i in range(max(timing_trials, 1000)):
        x = X[i % len(X)]
        t0 = time.perf_counter()
        model.predict_proba(x)
        times.append((time.perf_counter() - t0) * 1e3)
    return EvalReport(accuracy, f1w, recw, confusion,
                      float(np.mean(times)), float(np.std(times)))
