"""Class matching and coordination: marketing assets, promo targeting,
the reminder cadence, recordings, ratings, and next-class emails.

Everything is driven by an injected clock; `tick(now)` executes due
actions exactly once, in due order, so the outbox sequence is a pure
function of store state, clock trajectory, and seed.
"""
from __future__ import annotations

import threading
from datetime import datetime, timedelta
from typing import Protocol

from .errors import ConflictError, ValidationError
from .messaging import Mailer
from .ports import Ports
from .qr import encode_qr
from .store import (
    ActionKind,
    ActionState,
    ClassStatus,
    MarketingAssets,
    Repository,
)

PROMO_OFFSETS = (timedelta(days=0), timedelta(days=3), timedelta(days=7))
REMINDER_OFFSETS = (
    (ActionKind.LOGISTICS_T14D, timedelta(days=14)),
    (ActionKind.LOGISTICS_T7D, timedelta(days=7)),
    (ActionKind.LOGISTICS_T3D, timedelta(days=3)),
    (ActionKind.LOGISTICS_T1D, timedelta(days=1)),
)
JOIN_NOW_LEAD = timedelta(minutes=10)
MAX_ATTEMPTS = 3
RETRY_BACKOFF = timedelta(minutes=30)

_LOGISTICS_TEMPLATES = {
    ActionKind.LOGISTICS_T14D: "logistics_14d",
    ActionKind.LOGISTICS_T7D: "logistics_7d",
    ActionKind.LOGISTICS_T3D: "logistics_3d",
    ActionKind.LOGISTICS_T1D: "logistics_1d",
}


class Recommender(Protocol):
    def top_n(self, student_id: str, n: int) -> tuple[list[tuple[str, float]], bool]:
        """Returns ([(class_id, score)...], used_popularity_fallback)."""
        ...


class PortFailure(Exception):
    pass


class Coordinator:
    def __init__(self, repo: Repository, mailer: Mailer, ports: Ports, recommender: Recommender):
        self.repo = repo
        self.mailer = mailer
        self.ports = ports
        self.recommender = recommender
        self._tick_guard = threading.Lock()

    # -- scheduling ----------------------------------------------------

    def on_class_published(self, class_id: str, now: datetime) -> list[str]:
        cls = self.repo.get_class(class_id)
        if cls.status != ClassStatus.PUBLISHED:
            raise ConflictError(f"class {class_id} is not published")
        future = sorted(s for s in cls.schedule if s > now)
        if not future:
            raise ValidationError(f"class {class_id} has no future sessions")
        duration = timedelta(minutes=cls.duration_minutes)
        scheduled: list[str] = []
        with self.repo.transaction():
            self._generate_assets(class_id, now)
            for offset in PROMO_OFFSETS:
                scheduled.append(self.repo.add_action(class_id, ActionKind.TEACHER_PROMO, now + offset).action_id)
                scheduled.append(self.repo.add_action(class_id, ActionKind.TARGET_LIST_PROMO, now + offset).action_id)
            first = future[0]
            for kind, lead in REMINDER_OFFSETS:
                scheduled.append(self.repo.add_action(class_id, kind, first - lead, session_at=first).action_id)
            for session in future:
                scheduled.append(
                    self.repo.add_action(class_id, ActionKind.JOIN_NOW_T10M, session - JOIN_NOW_LEAD, session_at=session).action_id
                )
            end = future[-1] + duration
            for kind in (ActionKind.RECORDING_SHARE, ActionKind.RATINGS_REQUEST, ActionKind.NEXT_RECS):
                scheduled.append(self.repo.add_action(class_id, kind, end, session_at=future[-1]).action_id)
        return scheduled

    def _generate_assets(self, class_id: str, now: datetime) -> MarketingAssets:
        cls = self.repo.get_class(class_id)
        teacher = self.repo.teacher_for_class(class_id)
        qr_payload = f"{self.mailer.base_url}/classes/{class_id}?src=qr"
        matrix = encode_qr(qr_payload)
        qr_text = "\n".join("".join("#" if v else "." for v in row) for row in matrix)
        sessions = ", ".join(s.isoformat() for s in cls.schedule)
        flier = (
            f"{cls.title}\n{'=' * len(cls.title)}\n\n"
            f"{cls.description}\n\n"
            f"Taught by {teacher.name if teacher else 'a student teacher'}\n"
            f"Grades {cls.grade_range[0]}-{cls.grade_range[1]}\n"
            f"Sessions: {sessions}\n\n"
            f"Scan to sign up: {qr_payload}\n"
        )
        folder = self.ports.folders.create_folder(f"marketing-{class_id}")
        self.ports.folders.add_file(folder, "flier.txt", flier.encode())
        self.ports.folders.add_file(folder, "qr.txt", qr_text.encode())
        cls.assets_folder = folder
        assets = MarketingAssets(class_id=class_id, qr_payload=qr_payload, flier_text=flier, folder_link=folder)
        self.repo._put("assets", assets)
        return assets

    def cancel_class(self, class_id: str) -> int:
        """Cancel every still-pending action for the class."""
        n = 0
        with self.repo.transaction():
            for act in self.repo.actions_for_class(class_id):
                if act.state == ActionState.PENDING:
                    act.state = ActionState.CANCELLED
                    n += 1
        return n

    # -- targeting -----------------------------------------------------

    def compute_target_list(self, class_id: str) -> list[str]:
        """Students whose current top-3 recommendations contain the class."""
        enrolled = {l.student_id for l in self.repo.enrollments_for_class(class_id)}
        out = []
        for student in sorted(self.repo.all("students"), key=lambda s: s.student_id):
            if student.student_id in enrolled:
                continue
            ranked, _fallback = self.recommender.top_n(student.student_id, 3)
            if any(cid == class_id for cid, _ in ranked):
                out.append(student.student_id)
        return out

    # -- execution -----------------------------------------------------

    def tick(self, now: datetime) -> list[str]:
        if not self._tick_guard.acquire(blocking=False):
            raise ConflictError("tick already running")
        try:
            executed: list[str] = []
            due = sorted(
                (a for a in self.repo.pending_actions() if a.due_at <= now),
                key=lambda a: (a.due_at, int(a.action_id.split("-")[1])),
            )
            for act in due:
                action_id = act.action_id
                try:
                    with self.repo.transaction():
                        live = self.repo.get("actions", action_id)
                        self._execute(live, now)
                        live.state = ActionState.DONE
                    executed.append(action_id)
                except PortFailure:
                    live = self.repo.get("actions", action_id)  # post-rollback object
                    with self.repo.transaction():
                        live.attempts += 1
                        if live.attempts >= MAX_ATTEMPTS:
                            live.state = ActionState.DEAD_LETTER
                        else:
                            live.due_at = now + RETRY_BACKOFF * live.attempts
            return executed
        finally:
            self._tick_guard.release()

    def _send(self, entry) -> None:
        if not self.ports.email.send(entry):
            raise PortFailure(entry.entry_id)
        entry.delivery_state = "sent"

    def _promo_variant(self, act) -> int:
        siblings = sorted(
            (a for a in self.repo.actions_for_class(act.class_id) if a.kind == act.kind),
            key=lambda a: a.due_at,
        )
        return siblings.index(act) + 1

    def _class_audience(self, class_id: str):
        teacher = self.repo.teacher_for_class(class_id)
        students = sorted(
            (self.repo.get("students", l.student_id) for l in self.repo.enrollments_for_class(class_id)),
            key=lambda s: s.student_id,
        )
        return teacher, students

    def _execute(self, act, now: datetime) -> None:
        cls = self.repo.get_class(act.class_id)
        teacher, students = self._class_audience(act.class_id)
        kind = act.kind

        if kind == ActionKind.TEACHER_PROMO:
            variant = self._promo_variant(act)
            entry = self.mailer.render(
                f"teacher_promo_{variant}",
                recipient=teacher.email,
                context={"teacher_name": teacher.name, "class_title": cls.title},
                links={"assets": cls.assets_folder},
                now=now,
            )
            self._send(entry)

        elif kind == ActionKind.TARGET_LIST_PROMO:
            variant = self._promo_variant(act)
            for student_id in self.compute_target_list(act.class_id):
                student = self.repo.get("students", student_id)
                entry = self.mailer.render(
                    f"target_promo_{variant}",
                    recipient=student.email,
                    context={
                        "student_name": student.name,
                        "class_title": cls.title,
                        "class_description": cls.description,
                    },
                    links={"signup": f"/classes/{cls.class_id}"},
                    now=now,
                )
                self._send(entry)

        elif kind in _LOGISTICS_TEMPLATES:
            template = _LOGISTICS_TEMPLATES[kind]
            for person in ([teacher] if teacher else []) + students:
                entry = self.mailer.render(
                    template,
                    recipient=person.email,
                    context={
                        "name": person.name,
                        "class_title": cls.title,
                        "session_at": act.session_at.isoformat(),
                    },
                    links={"class_page": f"/classes/{cls.class_id}"},
                    now=now,
                )
                self._send(entry)

        elif kind == ActionKind.JOIN_NOW_T10M:
            for person in ([teacher] if teacher else []) + students:
                entry = self.mailer.render(
                    "join_now",
                    recipient=person.email,
                    context={"name": person.name, "class_title": cls.title},
                    links={"join": cls.meeting_link},
                    now=now,
                )
                self._send(entry)

        elif kind == ActionKind.RECORDING_SHARE:
            folder = self.ports.folders.create_folder(f"recordings-{cls.class_id}")
            cls.recording_folder = folder
            for person in ([teacher] if teacher else []) + students:
                entry = self.mailer.render(
                    "recording_share",
                    recipient=person.email,
                    context={"name": person.name, "class_title": cls.title},
                    links={"recording": folder},
                    now=now,
                )
                self._send(entry)

        elif kind == ActionKind.RATINGS_REQUEST:
            for student in students:
                entry = self.mailer.render(
                    "ratings_request",
                    recipient=student.email,
                    context={"student_name": student.name, "class_title": cls.title},
                    links={"feedback": f"/feedback?class={cls.class_id}"},
                    now=now,
                )
                self._send(entry)

        elif kind == ActionKind.NEXT_RECS:
            for student in students:
                ranked, _fallback = self.recommender.top_n(student.student_id, 3)
                lines = []
                for i, (cid, score) in enumerate(ranked, 1):
                    rec_cls = self.repo.get_class(cid)
                    lines.append(f"  {i}. {rec_cls.title}")
                entry = self.mailer.render(
                    "next_recs",
                    recipient=student.email,
                    context={
                        "student_name": student.name,
                        "class_title": cls.title,
                        "recommendations": "\n".join(lines) if lines else "  (no suggestions yet)",
                    },
                    links={"catalog": "/classes"},
                    now=now,
                )
                self._send(entry)
            if cls.status == ClassStatus.PUBLISHED:
                self.repo.set_class_status(cls.class_id, ClassStatus.COMPLETED)

        else:  # pragma: no cover - enum is closed
            raise ValidationError(f"unknown action kind {kind}")
