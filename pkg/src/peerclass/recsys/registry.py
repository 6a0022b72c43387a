"""Per-class model training, scoring, persistence, and top-N ranking."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ValidationError
from ..store import Repository
from .features import (
    BINNED_LEVELS,
    LABEL_BINARY,
    RosterSnapshot,
    encode_features_for_student,
    n_label_classes,
)
from .forest import RandomForestClassifier
from .linear import LogisticRegressionClassifier
from .mlp import MLPClassifier

MODEL_LOGREG = "logreg"
MODEL_FOREST = "random_forest"
MODEL_MLP = "mlp"


@dataclass
class ModelConfig:
    logreg_lr: float = 0.1
    logreg_epochs: int = 500
    logreg_l2: float = 1e-4
    forest_trees: int = 50
    forest_depth: int = 6
    forest_features: int | str = "sqrt"
    mlp_hidden: tuple[int, ...] = (32,)
    mlp_lr: float = 0.05
    mlp_epochs: int = 500
    seed: int = 0
    test_fraction: float = 0.2
    threshold: float = 0.5
    allow_constant: bool = False

    def validate(self) -> None:
        if not 0 < self.threshold < 1:
            raise ValidationError("threshold must be in (0, 1)")
        for name in ("logreg_lr", "logreg_epochs", "forest_trees", "forest_depth", "mlp_lr", "mlp_epochs"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")


@dataclass
class ClassModel:
    class_id: str
    model_type: str
    estimator: object
    roster_hash: str
    encoding: str
    label_scheme: str
    seed: int
    train_seconds: float = 0.0
    is_constant: bool = False
    constant_value: float = 0.0

    def predict_probability(self, x: np.ndarray) -> float:
        """Probability in [0, 1] that the student takes the class."""
        if self.is_constant:
            return self.constant_value
        proba = self.estimator.predict_proba(np.atleast_2d(x))[0]
        if self.label_scheme == LABEL_BINARY:
            return float(proba[1])
        return float(np.dot(proba, BINNED_LEVELS))

    def to_blob(self) -> str:
        return json.dumps(
            {
                "format": 1,
                "class_id": self.class_id,
                "model_type": self.model_type,
                "roster_hash": self.roster_hash,
                "encoding": self.encoding,
                "label_scheme": self.label_scheme,
                "seed": self.seed,
                "train_seconds": self.train_seconds,
                "is_constant": self.is_constant,
                "constant_value": self.constant_value,
                "params": None if self.is_constant else self.estimator.to_params(),
            },
            sort_keys=True,
        )

    @classmethod
    def from_blob(cls, blob: str, config: Optional[ModelConfig] = None) -> "ClassModel":
        d = json.loads(blob)
        if d.get("format") != 1:
            raise ValidationError("unsupported model blob format")
        config = config or ModelConfig()
        model = cls(
            class_id=d["class_id"],
            model_type=d["model_type"],
            estimator=None,
            roster_hash=d["roster_hash"],
            encoding=d["encoding"],
            label_scheme=d["label_scheme"],
            seed=d["seed"],
            train_seconds=d["train_seconds"],
            is_constant=d["is_constant"],
            constant_value=d["constant_value"],
        )
        if not model.is_constant:
            est = _make_estimator(model.model_type, n_label_classes(model.label_scheme), config, model.seed)
            est.load_params(d["params"])
            model.estimator = est
        return model


def _make_estimator(model_type: str, n_classes: int, config: ModelConfig, seed: int):
    if model_type == MODEL_LOGREG:
        return LogisticRegressionClassifier(
            n_classes=n_classes, lr=config.logreg_lr, epochs=config.logreg_epochs, l2=config.logreg_l2
        )
    if model_type == MODEL_FOREST:
        return RandomForestClassifier(
            n_trees=config.forest_trees,
            max_depth=config.forest_depth,
            features_per_split=config.forest_features,
            n_classes=n_classes,
            seed=seed,
        )
    if model_type == MODEL_MLP:
        return MLPClassifier(
            hidden_sizes=config.mlp_hidden, n_classes=n_classes, lr=config.mlp_lr, epochs=config.mlp_epochs, seed=seed
        )
    raise ValidationError(f"unknown model type {model_type!r}")


def train_class_model(
    class_id: str,
    X: np.ndarray,
    y: np.ndarray,
    model_type: str,
    config: ModelConfig,
    roster_hash: str,
    encoding: str,
    label_scheme: str,
) -> ClassModel:
    """Fit one per-class predictor; y holds class indices for the scheme."""
    config.validate()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    model = ClassModel(
        class_id=class_id,
        model_type=model_type,
        estimator=None,
        roster_hash=roster_hash,
        encoding=encoding,
        label_scheme=label_scheme,
        seed=config.seed,
    )
    if np.unique(y).size < 2:
        if not config.allow_constant:
            raise ValidationError(f"degenerate labels for class {class_id}: only one label value present")
        model.is_constant = True
        if label_scheme == LABEL_BINARY:
            model.constant_value = float(y[0])
        else:
            model.constant_value = float(BINNED_LEVELS[int(y[0])])
        return model
    est = _make_estimator(model_type, n_label_classes(label_scheme), config, config.seed)
    t0 = time.perf_counter()
    est.fit(X, y)
    model.train_seconds = time.perf_counter() - t0
    model.estimator = est
    return model


@dataclass
class Recommendation:
    class_id: str
    score: float


def recommend_top_n(
    repo: Repository,
    models: dict[str, ClassModel],
    snapshot: Optional[RosterSnapshot],
    student_id: str,
    n: int,
) -> tuple[list[Recommendation], bool]:
    """Rank untaken published classes; falls back to popularity order
    (flagged) when no trained models are available."""
    taken = {l.class_id for l in repo.enrollments_for_student(student_id)}
    candidates = [c.class_id for c in repo.published_classes() if c.class_id not in taken]
    if not models or snapshot is None:
        counts = repo.signup_counts()
        ranked = sorted(candidates, key=lambda cid: (-counts.get(cid, 0), cid))
        return [Recommendation(cid, float(counts.get(cid, 0))) for cid in ranked[:n]], True
    scored = []
    for cid in candidates:
        model = models.get(cid)
        if model is None:
            continue
        if model.roster_hash != snapshot.roster_hash:
            raise ValidationError(f"model for {cid} was trained on a different class roster")
        x = encode_features_for_student(repo, snapshot, student_id, cid, model.encoding)
        scored.append(Recommendation(cid, model.predict_probability(x)))
    scored.sort(key=lambda r: (-r.score, r.class_id))
    return scored[:n], False


class RecsysService:
    """Holds the current snapshot + per-class models for the live service."""

    def __init__(self, repo: Repository, config: Optional[ModelConfig] = None):
        self.repo = repo
        self.config = config or ModelConfig()
        self.snapshot: Optional[RosterSnapshot] = None
        self.models: dict[str, ClassModel] = {}

    def top_n(self, student_id: str, n: int) -> tuple[list[tuple[str, float]], bool]:
        recs, fallback = recommend_top_n(self.repo, self.models, self.snapshot, student_id, n)
        return [(r.class_id, r.score) for r in recs], fallback
