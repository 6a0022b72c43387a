"""Synthetic fixture generator.

World model: tags drive preference. Every class gets a small tag set,
every student a latent interest tag set, and the signup probability for
a (student, class) pair rises linearly with the Jaccard similarity of
the two sets, reaching 1.0 at full overlap. Everything is drawn from a
single seeded generator in a fixed order, so a seed pins the fixture.
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import timedelta

import numpy as np

from ..clock import utc
from ..errors import ValidationError
from ..store import (
    ClassRecord,
    ClassStatus,
    ClassTagLink,
    EnrollmentLink,
    Repository,
    StudentRecord,
    TeacherRecord,
    TeachingLink,
)
from ..recsys.similarity import tag_similarity

BASE_TIME = utc(2024, 1, 1)


@dataclass
class SynthConfig:
    seed: int
    n_students: int = 900
    n_classes: int = 80
    n_tags: int = 20
    tags_per_class: tuple[int, int] = (2, 4)
    interest_tags_per_student: tuple[int, int] = (2, 5)
    base_rate: float = 0.01  # signup probability at zero similarity
    noise: float = 0.0  # 0 = affinity only, 1 = pure chance
    min_signups_per_student: int = 1

    def validate(self) -> None:
        for name in ("n_students", "n_classes", "n_tags"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.tags_per_class[1] > self.n_tags:
            raise ValidationError("more tags per class than tags exist")
        if self.interest_tags_per_student[1] > self.n_tags:
            raise ValidationError("more interest tags per student than tags exist")
        if not 0 <= self.noise <= 1:
            raise ValidationError("noise must be in [0, 1]")


def signup_probability(similarity: float, base_rate: float) -> float:
    """Linear affinity rule: base rate at 0 similarity, certainty at 1."""
    return base_rate + (1.0 - base_rate) * similarity


def generate(config: SynthConfig) -> Repository:
    config.validate()
    rng = np.random.default_rng(config.seed)
    repo = Repository()

    tag_labels = [f"topic-{i:02d}" for i in range(config.n_tags)]
    with repo.transaction():
        for label in tag_labels:
            repo._find_or_create_tag(label)
        tag_ids = {t.label: t.tag_id for t in repo.all("tags")}

        class_tag_sets: list[frozenset[str]] = []
        for j in range(config.n_classes):
            k = int(rng.integers(config.tags_per_class[0], config.tags_per_class[1] + 1))
            chosen = sorted(rng.choice(config.n_tags, size=k, replace=False).tolist())
            tags = frozenset(tag_labels[i] for i in chosen)
            class_tag_sets.append(tags)
            teacher = TeacherRecord(
                teacher_id=repo._next_id("teachers"),
                email=f"teacher{j:03d}@example.org",
                name=f"Teacher {j:03d}",
            )
            repo._put("teachers", teacher)
            cls = ClassRecord(
                class_id=repo._next_id("classes"),
                title=f"Class {j:03d}",
                description=f"Synthetic class {j:03d} covering {', '.join(sorted(tags))}.",
                grade_range=(0, 12),
                status=ClassStatus.PUBLISHED,
                schedule=[BASE_TIME + timedelta(days=30 + j)],
                meeting_link=f"meet://class/synth-{j:03d}",
            )
            repo._put("classes", cls)
            repo._put("teaching", TeachingLink(teacher_id=teacher.teacher_id, class_id=cls.class_id))
            for label in sorted(tags):
                repo._put("class_tags", ClassTagLink(class_id=cls.class_id, tag_id=tag_ids[label]))

        class_ids = [c.class_id for c in repo.published_classes()]

        for s in range(config.n_students):
            k = int(rng.integers(config.interest_tags_per_student[0], config.interest_tags_per_student[1] + 1))
            chosen = sorted(rng.choice(config.n_tags, size=k, replace=False).tolist())
            interest = frozenset(tag_labels[i] for i in chosen)
            student = StudentRecord(
                student_id=repo._next_id("students"),
                email=f"student{s:04d}@example.org",
                name=f"Student {s:04d}",
                grade_level=int(rng.integers(0, 13)),
                demographics={"interest_tags": ",".join(sorted(interest))},
                created_at=BASE_TIME,
            )
            repo._put("students", student)

            sims = np.array([tag_similarity(tags, interest) for tags in class_tag_sets])
            effective = (1.0 - config.noise) * sims + config.noise * rng.random(config.n_classes)
            probs = signup_probability(effective, config.base_rate)
            draws = rng.random(config.n_classes)
            taken = draws < probs
            if taken.sum() < config.min_signups_per_student:
                taken[int(np.argmax(effective))] = True
            for j in np.nonzero(taken)[0]:
                repo._put(
                    "enrollments",
                    EnrollmentLink(
                        student_id=student.student_id,
                        class_id=class_ids[int(j)],
                        enrolled_at=BASE_TIME + timedelta(days=int(j)),
                    ),
                )
    return repo
