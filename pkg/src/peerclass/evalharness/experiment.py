"""Experiment runner: version and model-type comparisons on a fixture.

Versions:
  v1_all         catalog-order recommendations (no learning), hit-rate@3
  v2_popularity  most-popular-untaken recommendations, hit-rate@3
  v3_multi       one multinomial model over all classes, hit-rate@3
  v4_binary      per-class models, binary taken-class inputs
  v5_{it|nt}_{bo|to}  per-class models; it/nt = inputs with/without tag
                 similarities, bo/to = binary vs binned (tagged) outputs
v4_binary and v5_nt_bo are the same encoding; both names are accepted.
"""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ValidationError
from ..store import Repository
from ..recsys.features import (
    BINNED_LEVELS,
    LABEL_BINARY,
    LABEL_BINNED,
    RosterSnapshot,
    V4_BINARY,
    V5_TAGGED,
    snap_to_level,
)
from ..recsys.linear import LogisticRegressionClassifier
from ..recsys.registry import MODEL_LOGREG, ModelConfig, train_class_model
from ..recsys.similarity import tag_similarity

PER_CLASS_VERSIONS = {
    "v4_binary": (V4_BINARY, LABEL_BINARY),
    "v5_nt_bo": (V4_BINARY, LABEL_BINARY),
    "v5_nt_to": (V4_BINARY, LABEL_BINNED),
    "v5_it_bo": (V5_TAGGED, LABEL_BINARY),
    "v5_it_to": (V5_TAGGED, LABEL_BINNED),
}
RANKING_VERSIONS = ("v1_all", "v2_popularity", "v3_multi")
ALL_VERSIONS = tuple(RANKING_VERSIONS) + tuple(PER_CLASS_VERSIONS)

DEFAULT_MIN_SIGNUPS = 5


@dataclass
class ExperimentConfig:
    version: str
    model_type: str = MODEL_LOGREG
    model: ModelConfig = field(default_factory=lambda: ModelConfig(allow_constant=True))
    min_signups: int = DEFAULT_MIN_SIGNUPS

    def validate(self) -> None:
        if self.version not in ALL_VERSIONS:
            raise ValidationError(f"unknown version {self.version!r}; expected one of {ALL_VERSIONS}")


@dataclass
class EvalReport:
    version: str
    model_type: str
    seed: int
    fixture_hash: str
    metric: str  # per_class_accuracy | hit_rate_at_3
    per_class: list[tuple[str, int, float]] = field(default_factory=list)  # (class_id, signups, accuracy)
    skipped_classes: list[str] = field(default_factory=list)
    mean_accuracy: float = 0.0
    max_accuracy: float = 0.0
    hit_rate: Optional[float] = None
    train_seconds_total: float = 0.0
    train_seconds_per_class: dict[str, float] = field(default_factory=dict)
    predict_seconds_total: float = 0.0
    config_echo: dict = field(default_factory=dict)

    def to_json(self) -> str:
        """Deterministic portion only; wall times live in timing_json()."""
        return json.dumps(
            {
                "version": self.version,
                "model_type": self.model_type,
                "seed": self.seed,
                "fixture_hash": self.fixture_hash,
                "metric": self.metric,
                "per_class": [[c, n, a] for c, n, a in self.per_class],
                "skipped_classes": self.skipped_classes,
                "mean_accuracy": self.mean_accuracy,
                "max_accuracy": self.max_accuracy,
                "hit_rate": self.hit_rate,
                "config_echo": self.config_echo,
            },
            sort_keys=True,
            indent=1,
        )

    def timing_json(self) -> str:
        return json.dumps(
            {
                "train_seconds_total": self.train_seconds_total,
                "train_seconds_per_class": self.train_seconds_per_class,
                "predict_seconds_total": self.predict_seconds_total,
            },
            sort_keys=True,
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str, timing_text: Optional[str] = None) -> "EvalReport":
        d = json.loads(text)
        rep = cls(
            version=d["version"],
            model_type=d["model_type"],
            seed=d["seed"],
            fixture_hash=d["fixture_hash"],
            metric=d["metric"],
            per_class=[(c, n, a) for c, n, a in d["per_class"]],
            skipped_classes=d["skipped_classes"],
            mean_accuracy=d["mean_accuracy"],
            max_accuracy=d["max_accuracy"],
            hit_rate=d["hit_rate"],
            config_echo=d["config_echo"],
        )
        if timing_text:
            t = json.loads(timing_text)
            rep.train_seconds_total = t["train_seconds_total"]
            rep.train_seconds_per_class = t["train_seconds_per_class"]
            rep.predict_seconds_total = t["predict_seconds_total"]
        return rep


@dataclass
class FixtureMatrices:
    """Dense per-fixture views used by every experiment."""

    snapshot: RosterSnapshot
    student_ids: list[str]
    taken: np.ndarray  # (n_students, n_classes) in {0,1}
    sims: np.ndarray  # jaccard(class tags, student interest tags)

    @classmethod
    def from_repo(cls, repo: Repository) -> "FixtureMatrices":
        snapshot = RosterSnapshot.from_repo(repo)
        students = sorted(repo.all("students"), key=lambda s: s.student_id)
        student_ids = [s.student_id for s in students]
        col = {cid: i for i, cid in enumerate(snapshot.class_ids)}
        n, m = len(students), len(snapshot.class_ids)
        taken = np.zeros((n, m))
        row = {sid: i for i, sid in enumerate(student_ids)}
        for link in repo.all("enrollments"):
            if link.class_id in col and link.student_id in row:
                taken[row[link.student_id], col[link.class_id]] = 1.0
        interests = []
        for s in students:
            tags: set[str] = set()
            for j in np.nonzero(taken[row[s.student_id]])[0]:
                tags |= snapshot.tags[snapshot.class_ids[int(j)]]
            interests.append(frozenset(tags))
        sims = np.zeros((n, m))
        for j, cid in enumerate(snapshot.class_ids):
            ctags = snapshot.tags[cid]
            for i in range(n):
                sims[i, j] = tag_similarity(ctags, interests[i])
        return cls(snapshot=snapshot, student_ids=student_ids, taken=taken, sims=sims)


def fixture_hash(repo: Repository) -> str:
    return hashlib.sha256(repo.dump().encode()).hexdigest()[:16]


def stratified_split(y_binary: np.ndarray, test_fraction: float, rng: np.random.Generator):
    """Index split keeping both label values in train and test when possible."""
    test_idx: list[int] = []
    for value in (0.0, 1.0):
        idx = np.nonzero(y_binary == value)[0]
        if idx.size == 0:
            continue
        perm = idx[rng.permutation(idx.size)]
        n_test = max(1, int(round(idx.size * test_fraction))) if idx.size > 1 else 0
        test_idx.extend(perm[:n_test].tolist())
    mask = np.zeros(y_binary.size, dtype=bool)
    mask[test_idx] = True
    return np.nonzero(~mask)[0], np.nonzero(mask)[0]


def _binned_indices(taken_col: np.ndarray, sim_col: np.ndarray) -> np.ndarray:
    levels = list(BINNED_LEVELS)
    out = np.empty(taken_col.size, dtype=int)
    for i in range(taken_col.size):
        level = 1.0 if taken_col[i] == 1.0 else snap_to_level(float(sim_col[i]))
        out[i] = levels.index(level)
    return out


def run_experiment(repo: Repository, config: ExperimentConfig) -> EvalReport:
    config.validate()
    mats = FixtureMatrices.from_repo(repo)
    if mats.taken.sum() == 0:
        raise ValidationError("degenerate fixture: no enrollments")
    report = EvalReport(
        version=config.version,
        model_type=config.model_type if config.version in PER_CLASS_VERSIONS else "-",
        seed=config.model.seed,
        fixture_hash=fixture_hash(repo),
        metric="per_class_accuracy" if config.version in PER_CLASS_VERSIONS else "hit_rate_at_3",
        config_echo={"version": config.version, "min_signups": config.min_signups, "seed": config.model.seed},
    )
    if config.version in PER_CLASS_VERSIONS:
        _run_per_class(mats, config, report)
    else:
        _run_ranking(mats, config, report)
    return report


def _run_per_class(mats: FixtureMatrices, config: ExperimentConfig, report: EvalReport) -> None:
    encoding, label_scheme = PER_CLASS_VERSIONS[config.version]
    n, m = mats.taken.shape
    inputs = mats.taken if encoding == V4_BINARY else np.where(mats.taken == 1.0, 1.0, mats.sims)
    threshold = config.model.threshold
    eligible = [j for j in range(m) if mats.taken[:, j].sum() >= config.min_signups]
    report.skipped_classes = [mats.snapshot.class_ids[j] for j in range(m) if j not in set(eligible)]

    warmed_up = False
    accs = []
    predict_seconds = 0.0
    for j in eligible:
        class_id = mats.snapshot.class_ids[j]
        X = np.delete(inputs, j, axis=1)
        y_bin = mats.taken[:, j]
        y = y_bin.astype(int) if label_scheme == LABEL_BINARY else _binned_indices(y_bin, mats.sims[:, j])
        rng = np.random.default_rng([config.model.seed, j])
        train_idx, test_idx = stratified_split(y_bin, config.model.test_fraction, rng)
        if not warmed_up:
            train_class_model(
                class_id, X[train_idx], y[train_idx], config.model_type, config.model,
                mats.snapshot.roster_hash, encoding, label_scheme,
            )
            warmed_up = True
        model = train_class_model(
            class_id, X[train_idx], y[train_idx], config.model_type, config.model,
            mats.snapshot.roster_hash, encoding, label_scheme,
        )
        t0 = time.perf_counter()
        preds = np.array([model.predict_probability(X[i]) for i in test_idx])
        predict_seconds += time.perf_counter() - t0
        acc = float(np.mean((preds >= threshold) == (y_bin[test_idx] == 1.0)))
        accs.append(acc)
        report.per_class.append((class_id, int(mats.taken[:, j].sum()), acc))
        report.train_seconds_per_class[class_id] = model.train_seconds
        report.train_seconds_total += model.train_seconds
    report.predict_seconds_total = predict_seconds
    report.mean_accuracy = float(np.mean(accs)) if accs else 0.0
    report.max_accuracy = float(np.max(accs)) if accs else 0.0


def _holdout_signups(mats: FixtureMatrices, seed: int, fraction: float):
    """Per-student 80/20 split of signups; returns (train_taken, heldout pairs)."""
    rng = np.random.default_rng([seed, 10_000])
    train = mats.taken.copy()
    heldout: list[tuple[int, int]] = []
    for i in range(mats.taken.shape[0]):
        idx = np.nonzero(mats.taken[i])[0]
        if idx.size < 2:
            continue
        perm = idx[rng.permutation(idx.size)]
        n_out = max(1, int(round(idx.size * fraction)))
        for j in perm[:n_out]:
            train[i, int(j)] = 0.0
            heldout.append((i, int(j)))
    return train, heldout


def _run_ranking(mats: FixtureMatrices, config: ExperimentConfig, report: EvalReport) -> None:
    train, heldout = _holdout_signups(mats, config.model.seed, config.model.test_fraction)
    if not heldout:
        raise ValidationError("degenerate fixture: no held-out signups")
    m = train.shape[1]

    if config.version == "v1_all":
        def top3(i: int) -> list[int]:
            return [j for j in range(m) if train[i, j] == 0.0][:3]

    elif config.version == "v2_popularity":
        popularity = train.sum(axis=0)
        order = sorted(range(m), key=lambda j: (-popularity[j], mats.snapshot.class_ids[j]))

        def top3(i: int) -> list[int]:
            return [j for j in order if train[i, j] == 0.0][:3]

    else:  # v3_multi: one multinomial model over all classes
        rows = []
        labels = []
        for i in range(train.shape[0]):
            for j in np.nonzero(train[i])[0]:
                x = train[i].copy()
                x[int(j)] = 0.0
                rows.append(x)
                labels.append(int(j))
        clf = LogisticRegressionClassifier(
            n_classes=m, lr=config.model.logreg_lr, epochs=min(config.model.logreg_epochs, 200),
            l2=config.model.logreg_l2,
        )
        t0 = time.perf_counter()
        clf.fit(np.array(rows), np.array(labels))
        report.train_seconds_total = time.perf_counter() - t0
        probs = clf.predict_proba(train)

        def top3(i: int) -> list[int]:
            order = sorted(range(m), key=lambda j: (-probs[i, j], mats.snapshot.class_ids[j]))
            return [j for j in order if train[i, j] == 0.0][:3]

    hits = sum(1 for i, j in heldout if j in top3(i))
    report.hit_rate = hits / len(heldout)
    report.mean_accuracy = report.hit_rate
    report.max_accuracy = report.hit_rate
