"""Feature and label encodings over a frozen class roster.

A model's feature space is pinned to a roster snapshot (ordered class
ids plus their tag sets, hashed); predictions against a store whose
roster hash differs are refused rather than silently mis-indexed.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from ..store import Repository
from .similarity import student_interest_tags, tag_similarity

V4_BINARY = "v4_binary"
V5_TAGGED = "v5_tagged"

LABEL_BINARY = "binary"
LABEL_BINNED = "binned"
BINNED_LEVELS = (0.0, 0.2, 0.5, 0.7, 0.8, 1.0)


@dataclass(frozen=True)
class RosterSnapshot:
    class_ids: tuple[str, ...]
    tags: dict[str, frozenset[str]] = field(hash=False, compare=False, default_factory=dict)

    @property
    def roster_hash(self) -> str:
        h = hashlib.sha256()
        for cid in self.class_ids:
            h.update(cid.encode())
            h.update(b"|")
            h.update(",".join(sorted(self.tags.get(cid, ()))).encode())
            h.update(b";")
        return h.hexdigest()[:16]

    @classmethod
    def from_repo(cls, repo: Repository) -> "RosterSnapshot":
        ids = tuple(c.class_id for c in repo.published_classes())
        return cls(class_ids=ids, tags={cid: repo.tags_for_class(cid) for cid in ids})

    def feature_classes(self, target_class: str) -> list[str]:
        if target_class not in self.class_ids:
            raise ValidationError(f"class {target_class} is not in the roster snapshot")
        return [cid for cid in self.class_ids if cid != target_class]


def snap_to_level(value: float) -> float:
    """Nearest binned level; exact midpoints snap to the higher level."""
    best = BINNED_LEVELS[0]
    best_dist = abs(value - best)
    for level in BINNED_LEVELS[1:]:
        dist = abs(value - level)
        if dist <= best_dist:  # ties round up (levels scanned ascending)
            best, best_dist = level, dist
    return best


def encode_features(
    snapshot: RosterSnapshot,
    taken: set[str],
    interest: frozenset[str],
    target_class: str,
    encoding: str,
) -> np.ndarray:
    """One row of model input for (student, target class)."""
    if encoding not in (V4_BINARY, V5_TAGGED):
        raise ValidationError(f"unknown feature encoding {encoding!r}")
    cols = snapshot.feature_classes(target_class)
    x = np.zeros(len(cols))
    for i, cid in enumerate(cols):
        if cid in taken:
            x[i] = 1.0
        elif encoding == V5_TAGGED:
            x[i] = tag_similarity(snapshot.tags.get(cid, ()), interest)
    return x


def encode_label(
    snapshot: RosterSnapshot,
    taken: set[str],
    interest: frozenset[str],
    target_class: str,
    scheme: str,
) -> float:
    if scheme == LABEL_BINARY:
        return 1.0 if target_class in taken else 0.0
    if scheme == LABEL_BINNED:
        if target_class in taken:
            return 1.0
        return snap_to_level(tag_similarity(snapshot.tags.get(target_class, ()), interest))
    raise ValidationError(f"unknown label scheme {scheme!r}")


def encode_features_for_student(
    repo: Repository, snapshot: RosterSnapshot, student_id: str, target_class: str, encoding: str
) -> np.ndarray:
    taken = {l.class_id for l in repo.enrollments_for_student(student_id)}
    interest = student_interest_tags(repo, student_id)
    return encode_features(snapshot, taken, interest, target_class, encoding)


def label_to_class_index(label: float, scheme: str) -> int:
    if scheme == LABEL_BINARY:
        return int(label)
    return BINNED_LEVELS.index(snap_to_level(label))


def n_label_classes(scheme: str) -> int:
    return 2 if scheme == LABEL_BINARY else len(BINNED_LEVELS)
