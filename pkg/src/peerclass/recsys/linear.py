"""Multinomial logistic regression trained by full-batch gradient descent.

Weights start at zero, so training is deterministic and invariant to
training-row order (the full-batch gradient is a sum over rows).
"""
from __future__ import annotations

import numpy as np


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class LogisticRegressionClassifier:
    def __init__(self, n_classes: int = 2, lr: float = 0.1, epochs: int = 500, l2: float = 1e-4):
        self.n_classes = n_classes
        self.lr = lr
        self.epochs = epochs
        self.l2 = l2
        self.W: np.ndarray | None = None
        self.b: np.ndarray | None = None

    def loss(self, X: np.ndarray, y: np.ndarray, W: np.ndarray, b: np.ndarray) -> float:
        P = softmax(X @ W + b)
        n = X.shape[0]
        ce = -np.log(np.clip(P[np.arange(n), y], 1e-12, None)).mean()
        return float(ce + 0.5 * self.l2 * np.sum(W * W))

    def gradients(self, X: np.ndarray, y: np.ndarray, W: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = X.shape[0]
        P = softmax(X @ W + b)
        Y = np.zeros_like(P)
        Y[np.arange(n), y] = 1.0
        G = (P - Y) / n
        return X.T @ G + self.l2 * W, G.sum(axis=0)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LogisticRegressionClassifier":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        d = X.shape[1]
        self.W = np.zeros((d, self.n_classes))
        self.b = np.zeros(self.n_classes)
        for _ in range(self.epochs):
            dW, db = self.gradients(X, y, self.W, self.b)
            self.W -= self.lr * dW
            self.b -= self.lr * db
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.W.shape[0]:
            raise ValueError(f"feature dimension mismatch: got {X.shape[1]}, model has {self.W.shape[0]}")
        return softmax(X @ self.W + self.b)

    def to_params(self) -> dict:
        return {"W": self.W.tolist(), "b": self.b.tolist()}

    def load_params(self, params: dict) -> None:
        self.W = np.array(params["W"], dtype=float)
        self.b = np.array(params["b"], dtype=float)
