"""Transactional repository over an embedded table store.

One engine serves both test and service builds: tables live in memory,
and when a file path is given every committed transaction rewrites the
line-delimited export atomically. Multi-row operations run inside
`transaction()`, which snapshots all tables and restores them if the
block raises, so a failed operation leaves the store byte-identical.
"""
from __future__ import annotations

import copy
import json
import os
import re
import threading
from datetime import datetime
from typing import Any, Optional

from ..errors import ConflictError, NotFoundError, ProfileRequired, ValidationError
from .records import (
    ActionKind,
    ActionState,
    CacheEntry,
    CacheState,
    ClassRecord,
    ClassStatus,
    ClassTagLink,
    EnrollmentLink,
    FeedbackResponse,
    InteractionEvent,
    InteractionKind,
    MarketingAssets,
    OutboxEntry,
    ScheduledAction,
    StudentRecord,
    TagRecord,
    TeacherRecord,
    TeachingLink,
    TrackingToken,
    record_from_dict,
    record_to_dict,
)

EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")

_RECORD_TYPES: dict[str, type] = {
    "students": StudentRecord,
    "teachers": TeacherRecord,
    "classes": ClassRecord,
    "enrollments": EnrollmentLink,
    "teaching": TeachingLink,
    "tags": TagRecord,
    "class_tags": ClassTagLink,
    "cache": CacheEntry,
    "feedback": FeedbackResponse,
    "interactions": InteractionEvent,
    "outbox": OutboxEntry,
    "tokens": TrackingToken,
    "actions": ScheduledAction,
    "assets": MarketingAssets,
}

_KEY_FIELDS: dict[str, Any] = {
    "students": "student_id",
    "teachers": "teacher_id",
    "classes": "class_id",
    "enrollments": ("student_id", "class_id"),
    "teaching": ("teacher_id", "class_id"),
    "tags": "tag_id",
    "class_tags": ("class_id", "tag_id"),
    "cache": "cache_id",
    "feedback": "response_id",
    "interactions": "event_id",
    "outbox": "entry_id",
    "tokens": "token",
    "actions": "action_id",
    "assets": "class_id",
}

_ID_PREFIX = {
    "students": "st",
    "teachers": "te",
    "classes": "cl",
    "tags": "tag",
    "cache": "ce",
    "feedback": "fb",
    "interactions": "ev",
    "outbox": "ob",
    "actions": "ac",
}


def canonical_tag(label: str) -> str:
    return label.strip().casefold()


class Repository:
    def __init__(self, path: Optional[str] = None):
        self._lock = threading.RLock()
        self._txn_depth = 0
        self._snapshot: Optional[tuple] = None
        self._failed = False
        self.path = path
        self.tables: dict[str, dict[Any, Any]] = {name: {} for name in _RECORD_TYPES}
        self.counters: dict[str, int] = {name: 0 for name in _ID_PREFIX}
        if path and os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                self.load(fh.read())

    # -- transactions -------------------------------------------------

    def transaction(self) -> "_Txn":
        return _Txn(self)

    def _begin(self) -> None:
        self._lock.acquire()
        self._txn_depth += 1
        if self._txn_depth == 1:
            self._snapshot = (copy.deepcopy(self.tables), dict(self.counters))
            self._failed = False

    def _end(self, ok: bool) -> None:
        if not ok:
            self._failed = True
        self._txn_depth -= 1
        if self._txn_depth == 0:
            if self._failed:
                self.tables, self.counters = self._snapshot
            elif self.path:
                self._persist()
            self._snapshot = None
        self._lock.release()

    def _persist(self) -> None:
        tmp = self.path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(self.dump())
        os.replace(tmp, self.path)

    # -- generic helpers ----------------------------------------------

    def _next_id(self, table: str) -> str:
        self.counters[table] += 1
        return f"{_ID_PREFIX[table]}-{self.counters[table]}"

    def _put(self, table: str, rec: Any) -> Any:
        key_field = _KEY_FIELDS[table]
        if isinstance(key_field, tuple):
            key = tuple(getattr(rec, f) for f in key_field)
        else:
            key = getattr(rec, key_field)
        self.tables[table][key] = rec
        return rec

    def get(self, table: str, key: Any) -> Any:
        return self.tables[table].get(key)

    def all(self, table: str) -> list[Any]:
        return list(self.tables[table].values())

    # -- students -----------------------------------------------------

    def find_student_by_email(self, email: str) -> Optional[StudentRecord]:
        email = email.strip().casefold()
        for rec in self.tables["students"].values():
            if rec.email == email:
                return rec
        return None

    def find_or_create_student(
        self, email: str, profile: Optional[dict] = None, now: Optional[datetime] = None
    ) -> tuple[StudentRecord, bool]:
        email = email.strip().casefold()
        if not EMAIL_RE.match(email):
            raise ValidationError(f"malformed email: {email!r}", fields=["email"])
        existing = self.find_student_by_email(email)
        if existing is not None:
            return existing, False
        if profile is None:
            raise ProfileRequired(f"no student on file for {email}; profile required")
        grade = int(profile.get("grade", 0))
        if not 0 <= grade <= 12:
            raise ValidationError("grade_level must be in [0, 12]", fields=["grade"])
        with self.transaction():
            rec = StudentRecord(
                student_id=self._next_id("students"),
                email=email,
                name=str(profile.get("name", "")),
                grade_level=grade,
                demographics=dict(profile.get("demographics", {})),
                created_at=now,
            )
            self._put("students", rec)
        return rec, True

    # -- classes and enrollment ---------------------------------------

    def get_class(self, class_id: str) -> ClassRecord:
        rec = self.get("classes", class_id)
        if rec is None:
            raise NotFoundError(f"unknown class {class_id}")
        return rec

    def set_class_status(self, class_id: str, status: ClassStatus) -> ClassRecord:
        rec = self.get_class(class_id)
        if status.rank < rec.status.rank:
            raise ConflictError(f"status cannot move backward: {rec.status.value} -> {status.value}")
        rec.status = status
        return rec

    def published_classes(self) -> list[ClassRecord]:
        return sorted(
            (c for c in self.tables["classes"].values() if c.status in (ClassStatus.PUBLISHED, ClassStatus.COMPLETED)),
            key=lambda c: c.class_id,
        )

    def enroll(self, student_id: str, class_id: str, now: Optional[datetime] = None) -> EnrollmentLink:
        if self.get("students", student_id) is None:
            raise NotFoundError(f"unknown student {student_id}")
        cls = self.get_class(class_id)
        if cls.status != ClassStatus.PUBLISHED:
            raise ConflictError(f"class {class_id} is not open for enrollment (status={cls.status.value})")
        existing = self.get("enrollments", (student_id, class_id))
        if existing is not None:
            return existing
        link = EnrollmentLink(student_id=student_id, class_id=class_id, enrolled_at=now)
        with self.transaction():
            self._put("enrollments", link)
        return link

    def enrollments_for_student(self, student_id: str) -> list[EnrollmentLink]:
        return [l for l in self.tables["enrollments"].values() if l.student_id == student_id]

    def enrollments_for_class(self, class_id: str) -> list[EnrollmentLink]:
        return [l for l in self.tables["enrollments"].values() if l.class_id == class_id]

    def signup_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for link in self.tables["enrollments"].values():
            counts[link.class_id] = counts.get(link.class_id, 0) + 1
        return counts

    # -- submissions ---------------------------------------------------

    def stage_submission(self, payload: dict, now: Optional[datetime] = None) -> CacheEntry:
        with self.transaction():
            entry = CacheEntry(
                cache_id=self._next_id("cache"),
                payload=copy.deepcopy(payload),
                submitted_at=now,
                state=CacheState.PENDING,
            )
            self._put("cache", entry)
        return entry

    def pending_submissions(self) -> list[CacheEntry]:
        return sorted(
            (e for e in self.tables["cache"].values() if e.state == CacheState.PENDING),
            key=lambda e: e.cache_id,
        )

    def promote_submission(self, cache_id: str, tags: list[str]) -> tuple[TeacherRecord, ClassRecord]:
        entry = self.get("cache", cache_id)
        if entry is None:
            raise NotFoundError(f"unknown cache entry {cache_id}")
        if entry.state != CacheState.PENDING:
            raise ConflictError(f"cache entry {cache_id} is {entry.state.value}, not pending")
        labels = [canonical_tag(t) for t in tags if canonical_tag(t)]
        if not labels:
            raise ValidationError("at least one tag is required to promote", fields=["tags"])
        p = entry.payload
        with self.transaction():
            teacher = self._find_teacher_by_email(p["teacher_email"].strip().casefold())
            if teacher is None:
                teacher = TeacherRecord(
                    teacher_id=self._next_id("teachers"),
                    email=p["teacher_email"].strip().casefold(),
                    name=p.get("teacher_name", ""),
                    bio=p.get("teacher_bio", ""),
                    photo_ref=p.get("photo_ref", ""),
                )
                self._put("teachers", teacher)
            cls = ClassRecord(
                class_id=self._next_id("classes"),
                title=p["title"],
                description=p["description"],
                grade_range=tuple(p.get("grade_range", (0, 12))),
                status=ClassStatus.APPROVED,
                schedule=[datetime.fromisoformat(s) if isinstance(s, str) else s for s in p.get("schedule", [])],
                duration_minutes=int(p.get("duration_minutes", 90)),
            )
            self._put("classes", cls)
            self._put("teaching", TeachingLink(teacher_id=teacher.teacher_id, class_id=cls.class_id))
            for label in dict.fromkeys(labels):
                tag = self._find_or_create_tag(label)
                self._put("class_tags", ClassTagLink(class_id=cls.class_id, tag_id=tag.tag_id))
            entry.state = CacheState.APPROVED
        return teacher, cls

    def _find_teacher_by_email(self, email: str) -> Optional[TeacherRecord]:
        for rec in self.tables["teachers"].values():
            if rec.email == email:
                return rec
        return None

    # -- tags ----------------------------------------------------------

    def _find_or_create_tag(self, label: str) -> TagRecord:
        label = canonical_tag(label)
        for tag in self.tables["tags"].values():
            if tag.label == label:
                return tag
        tag = TagRecord(tag_id=self._next_id("tags"), label=label)
        self._put("tags", tag)
        return tag

    def tags_for_class(self, class_id: str) -> frozenset[str]:
        tag_ids = {l.tag_id for l in self.tables["class_tags"].values() if l.class_id == class_id}
        return frozenset(self.tables["tags"][tid].label for tid in tag_ids)

    def teacher_for_class(self, class_id: str) -> Optional[TeacherRecord]:
        for link in self.tables["teaching"].values():
            if link.class_id == class_id:
                return self.get("teachers", link.teacher_id)
        return None

    # -- feedback and interactions -------------------------------------

    def record_feedback(self, student_id: str, class_id: str, criterion: str, rating: int, free_text: str = "") -> str:
        if not 1 <= int(rating) <= 5:
            raise ValidationError("rating must be in [1, 5]", fields=["rating"])
        if self.get("students", student_id) is None:
            raise NotFoundError(f"unknown student {student_id}")
        self.get_class(class_id)
        with self.transaction():
            rec = FeedbackResponse(
                response_id=self._next_id("feedback"),
                student_id=student_id,
                class_id=class_id,
                criterion=criterion,
                rating=int(rating),
                free_text=free_text,
            )
            self._put("feedback", rec)
        return rec.response_id

    def log_interaction(self, user_id: str, kind: InteractionKind, target: str, at: Optional[datetime] = None) -> str:
        with self.transaction():
            rec = InteractionEvent(
                event_id=self._next_id("interactions"),
                user_id=user_id,
                kind=kind,
                target=target,
                at=at,
            )
            self._put("interactions", rec)
        return rec.event_id

    def interactions_for_user(self, user_id: str) -> list[InteractionEvent]:
        return [e for e in self.tables["interactions"].values() if e.user_id == user_id]

    # -- outbox and tokens ---------------------------------------------

    def append_outbox(self, entry: OutboxEntry) -> OutboxEntry:
        with self.transaction():
            self._put("outbox", entry)
        return entry

    def outbox_entries(self) -> list[OutboxEntry]:
        return sorted(
            self.tables["outbox"].values(),
            key=lambda e: (e.created_at, int(e.entry_id.split("-")[1])),
        )

    def next_outbox_id(self) -> str:
        return self._next_id("outbox")

    def put_token(self, token: TrackingToken) -> None:
        self._put("tokens", token)

    # -- scheduled actions ---------------------------------------------

    def add_action(self, class_id: str, kind: ActionKind, due_at: datetime, session_at: Optional[datetime] = None) -> ScheduledAction:
        for a in self.tables["actions"].values():
            if a.class_id == class_id and a.kind == kind and a.session_at == session_at and a.due_at == due_at:
                return a
        act = ScheduledAction(
            action_id=self._next_id("actions"),
            class_id=class_id,
            kind=kind,
            due_at=due_at,
            session_at=session_at,
        )
        self._put("actions", act)
        return act

    def pending_actions(self) -> list[ScheduledAction]:
        return [a for a in self.tables["actions"].values() if a.state == ActionState.PENDING]

    def actions_for_class(self, class_id: str) -> list[ScheduledAction]:
        return [a for a in self.tables["actions"].values() if a.class_id == class_id]

    # -- audit ----------------------------------------------------------

    def audit_referential_integrity(self) -> list[str]:
        problems = []
        for link in self.tables["enrollments"].values():
            if self.get("students", link.student_id) is None:
                problems.append(f"enrollment references missing student {link.student_id}")
            if self.get("classes", link.class_id) is None:
                problems.append(f"enrollment references missing class {link.class_id}")
        for link in self.tables["teaching"].values():
            if self.get("teachers", link.teacher_id) is None:
                problems.append(f"teaching link references missing teacher {link.teacher_id}")
            if self.get("classes", link.class_id) is None:
                problems.append(f"teaching link references missing class {link.class_id}")
        for link in self.tables["class_tags"].values():
            if self.get("classes", link.class_id) is None:
                problems.append(f"class tag references missing class {link.class_id}")
            if self.get("tags", link.tag_id) is None:
                problems.append(f"class tag references missing tag {link.tag_id}")
        for cls in self.tables["classes"].values():
            if cls.status in (ClassStatus.PUBLISHED, ClassStatus.COMPLETED) and not self.tags_for_class(cls.class_id):
                problems.append(f"published class {cls.class_id} has no tags")
        return problems

    # -- dump / load -----------------------------------------------------

    def dump(self) -> str:
        """Line-delimited export: `<table>\\t<json>` per record, plus counters."""
        lines = [f"_counters\t{json.dumps(self.counters, sort_keys=True)}"]
        for table in sorted(_RECORD_TYPES):
            for key in sorted(self.tables[table], key=repr):
                rec = self.tables[table][key]
                lines.append(f"{table}\t{json.dumps(record_to_dict(rec), sort_keys=True)}")
        return "\n".join(lines) + "\n"

    def load(self, text: str) -> None:
        tables: dict[str, dict] = {name: {} for name in _RECORD_TYPES}
        counters = {name: 0 for name in _ID_PREFIX}
        for line in text.splitlines():
            if not line.strip():
                continue
            table, raw = line.split("\t", 1)
            if table == "_counters":
                counters.update(json.loads(raw))
                continue
            if table not in _RECORD_TYPES:
                raise ValidationError(f"unknown table in dump: {table}")
            rec = record_from_dict(_RECORD_TYPES[table], json.loads(raw))
            key_field = _KEY_FIELDS[table]
            if isinstance(key_field, tuple):
                key = tuple(getattr(rec, f) for f in key_field)
            else:
                key = getattr(rec, key_field)
            tables[table][key] = rec
        self.tables = tables
        self.counters = counters


class _Txn:
    def __init__(self, repo: Repository):
        self.repo = repo

    def __enter__(self) -> Repository:
        self.repo._begin()
        return self.repo

    def __exit__(self, exc_type, exc, tb) -> bool:
        self.repo._end(ok=exc_type is None)
        return False
