"""Bagged depth-limited decision trees with Gini splits.

Split selection is canonical: lowest weighted Gini cost, ties broken by
lowest feature index then lowest threshold, so a single tree grown with
all features is reproducible by exhaustive search.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class TreeNode:
    feature: int = -1
    threshold: float = 0.0
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    proba: Optional[np.ndarray] = None  # set on leaves

    @property
    def is_leaf(self) -> bool:
        return self.proba is not None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"proba": self.proba.tolist()}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeNode":
        if "proba" in d:
            return cls(proba=np.array(d["proba"], dtype=float))
        return cls(
            feature=d["feature"],
            threshold=d["threshold"],
            left=cls.from_dict(d["left"]),
            right=cls.from_dict(d["right"]),
        )


def best_split(X: np.ndarray, y: np.ndarray, n_classes: int, feature_idxs: np.ndarray):
    """Lowest-cost (cost, feature, threshold) over the given features, or None."""
    n = X.shape[0]
    best: tuple[float, int, float] | None = None
    for f in sorted(int(i) for i in feature_idxs):
        x = X[:, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        ys = y[order]
        cuts = np.nonzero(xs[1:] > xs[:-1])[0]
        if cuts.size == 0:
            continue
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), ys] = 1.0
        cum = np.cumsum(onehot, axis=0)
        nl = (cuts + 1).astype(float)
        nr = n - nl
        left = cum[cuts]
        right = cum[-1] - left
        gini_l = 1.0 - ((left / nl[:, None]) ** 2).sum(axis=1)
        gini_r = 1.0 - ((right / nr[:, None]) ** 2).sum(axis=1)
        cost = (nl * gini_l + nr * gini_r) / n
        i = int(np.argmin(cost))  # first minimum: lowest threshold on ties
        thr = float((xs[cuts[i]] + xs[cuts[i] + 1]) / 2.0)
        cand = (float(cost[i]), f, thr)
        if best is None or cand[0] < best[0]:
            best = cand
    return best


class DecisionTree:
    def __init__(self, max_depth: int = 6, features_per_split: int | str = "sqrt", n_classes: int = 2, seed: int = 0):
        self.max_depth = max_depth
        self.features_per_split = features_per_split
        self.n_classes = n_classes
        self.seed = seed
        self.root: Optional[TreeNode] = None

    def _n_features(self, d: int) -> int:
        if self.features_per_split == "sqrt":
            return max(1, int(round(math.sqrt(d))))
        return min(int(self.features_per_split), d)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "DecisionTree":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        rng = np.random.default_rng(self.seed)
        self.root = self._grow(X, y, depth=0, rng=rng)
        return self

    def _leaf(self, y: np.ndarray) -> TreeNode:
        counts = np.bincount(y, minlength=self.n_classes).astype(float)
        return TreeNode(proba=counts / counts.sum())

    def _grow(self, X: np.ndarray, y: np.ndarray, depth: int, rng: np.random.Generator) -> TreeNode:
        if depth >= self.max_depth or len(y) < 2 or np.unique(y).size == 1:
            return self._leaf(y)
        d = X.shape[1]
        k = self._n_features(d)
        feats = rng.permutation(d)[:k] if k < d else np.arange(d)
        found = best_split(X, y, self.n_classes, feats)
        if found is None:
            return self._leaf(y)
        _cost, f, thr = found
        mask = X[:, f] < thr
        node = TreeNode(feature=f, threshold=thr)
        node.left = self._grow(X[mask], y[mask], depth + 1, rng)
        node.right = self._grow(X[~mask], y[~mask], depth + 1, rng)
        return node

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros((X.shape[0], self.n_classes))
        for i, row in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] < node.threshold else node.right
            out[i] = node.proba
        return out


class RandomForestClassifier:
    def __init__(
        self,
        n_trees: int = 50,
        max_depth: int = 6,
        features_per_split: int | str = "sqrt",
        n_classes: int = 2,
        seed: int = 0,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.features_per_split = features_per_split
        self.n_classes = n_classes
        self.seed = seed
        self.trees: list[DecisionTree] = []

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForestClassifier":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        n = X.shape[0]
        seeds = np.random.SeedSequence(self.seed).generate_state(2 * self.n_trees)
        self.trees = []
        for t in range(self.n_trees):
            boot_rng = np.random.default_rng(seeds[2 * t])
            idx = boot_rng.integers(0, n, n)
            tree = DecisionTree(
                max_depth=self.max_depth,
                features_per_split=self.features_per_split,
                n_classes=self.n_classes,
                seed=int(seeds[2 * t + 1]),
            )
            tree.fit(X[idx], y[idx])
            self.trees.append(tree)
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        acc = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            acc += tree.predict_proba(X)
        return acc / len(self.trees)

    def to_params(self) -> dict:
        return {"trees": [t.root.to_dict() for t in self.trees]}

    def load_params(self, params: dict) -> None:
        self.trees = []
        for raw in params["trees"]:
            tree = DecisionTree(
                max_depth=self.max_depth,
                features_per_split=self.features_per_split,
                n_classes=self.n_classes,
            )
            tree.root = TreeNode.from_dict(raw)
            self.trees.append(tree)
