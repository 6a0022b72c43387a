"""Tag-set similarity and student interest derivation."""
from __future__ import annotations

from typing import Iterable

from ..store import Repository


def tag_similarity(a: Iterable[str], b: Iterable[str]) -> float:
    """Jaccard index of two tag sets; 0.0 when both are empty."""
    sa, sb = set(a), set(b)
    union = sa | sb
    if not union:
        return 0.0
    return len(sa & sb) / len(union)


def student_interest_tags(repo: Repository, student_id: str) -> frozenset[str]:
    """Union of the tag sets of every class the student has taken."""
    tags: set[str] = set()
    for link in repo.enrollments_for_student(student_id):
        tags |= repo.tags_for_class(link.class_id)
    return frozenset(tags)
