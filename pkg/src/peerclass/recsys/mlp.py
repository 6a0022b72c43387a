"""Feed-forward network with logistic hidden units, trained by
full-batch backpropagation on softmax cross-entropy."""
from __future__ import annotations

import numpy as np

from .linear import softmax


def _logistic(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


class MLPClassifier:
    def __init__(
        self,
        hidden_sizes: tuple[int, ...] = (32,),
        n_classes: int = 2,
        lr: float = 0.05,
        epochs: int = 500,
        seed: int = 0,
    ):
        self.hidden_sizes = tuple(hidden_sizes)
        self.n_classes = n_classes
        self.lr = lr
        self.epochs = epochs
        self.seed = seed
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []

    def _init_params(self, d: int) -> None:
        rng = np.random.default_rng(self.seed)
        sizes = [d, *self.hidden_sizes, self.n_classes]
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            self.weights.append(rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    def _forward(self, X: np.ndarray, weights=None, biases=None) -> list[np.ndarray]:
        weights = weights if weights is not None else self.weights
        biases = biases if biases is not None else self.biases
        activations = [X]
        a = X
        for i, (W, b) in enumerate(zip(weights, biases)):
            z = a @ W + b
            a = softmax(z) if i == len(weights) - 1 else _logistic(z)
            activations.append(a)
        return activations

    def loss(self, X: np.ndarray, y: np.ndarray, weights=None, biases=None) -> float:
        P = self._forward(X, weights, biases)[-1]
        n = X.shape[0]
        return float(-np.log(np.clip(P[np.arange(n), y], 1e-12, None)).mean())

    def gradients(self, X: np.ndarray, y: np.ndarray, weights=None, biases=None):
        weights = weights if weights is not None else self.weights
        biases = biases if biases is not None else self.biases
        n = X.shape[0]
        acts = self._forward(X, weights, biases)
        P = acts[-1]
        Y = np.zeros_like(P)
        Y[np.arange(n), y] = 1.0
        delta = (P - Y) / n
        dWs: list[np.ndarray] = [None] * len(weights)
        dbs: list[np.ndarray] = [None] * len(weights)
        for layer in range(len(weights) - 1, -1, -1):
            dWs[layer] = acts[layer].T @ delta
            dbs[layer] = delta.sum(axis=0)
            if layer > 0:
                a = acts[layer]
                delta = (delta @ weights[layer].T) * a * (1.0 - a)
        return dWs, dbs

    def fit(self, X: np.ndarray, y: np.ndarray) -> "MLPClassifier":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self._init_params(X.shape[1])
        for _ in range(self.epochs):
            dWs, dbs = self.gradients(X, y)
            for layer in range(len(self.weights)):
                self.weights[layer] -= self.lr * dWs[layer]
                self.biases[layer] -= self.lr * dbs[layer]
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.weights[0].shape[0]:
            raise ValueError(f"feature dimension mismatch: got {X.shape[1]}, model has {self.weights[0].shape[0]}")
        return self._forward(X)[-1]

    def to_params(self) -> dict:
        return {
            "weights": [W.tolist() for W in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    def load_params(self, params: dict) -> None:
        self.weights = [np.array(W, dtype=float) for W in params["weights"]]
        self.biases = [np.array(b, dtype=float) for b in params["biases"]]
