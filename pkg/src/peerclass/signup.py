"""Student and teacher signup flows.

Both flows validate fully before touching the store, so every rejection
leaves the datastore byte-identical.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Any, Optional

from .auth import sign_action
from .errors import ConflictError, ProfileRequired, ValidationError
from .messaging import Mailer
from .ports import Ports
from .store import ClassStatus, Repository
from .store.repo import EMAIL_RE

PHOTO_CAP_BYTES = 5 * 1024 * 1024
REVIEW_TOKEN_TTL = timedelta(days=14)


@dataclass
class StudentSignupRequest:
    email: str
    class_id: str
    profile: Optional[dict[str, Any]] = None  # name, grade, demographics


@dataclass
class SignupOutcome:
    kind: str  # "needs_profile" | "enrolled"
    student_id: str = ""
    welcome_email_id: str = ""

    @property
    def needs_profile(self) -> bool:
        return self.kind == "needs_profile"


@dataclass
class ClassSubmission:
    teacher_email: str
    teacher_name: str
    title: str
    description: str
    grade_range: tuple[int, int] = (0, 12)
    schedule: list[datetime] = field(default_factory=list)
    teacher_bio: str = ""
    photo: bytes = b""
    duration_minutes: int = 90


class SignupService:
    def __init__(self, repo: Repository, mailer: Mailer, ports: Ports, panel_email: str, secret: bytes):
        self.repo = repo
        self.mailer = mailer
        self.ports = ports
        self.panel_email = panel_email
        self.secret = secret

    def student_signup(self, request: StudentSignupRequest, now: datetime) -> SignupOutcome:
        email = request.email.strip().casefold()
        if not EMAIL_RE.match(email):
            raise ValidationError(f"malformed email: {request.email!r}", fields=["email"])
        cls = self.repo.get_class(request.class_id)
        if cls.status != ClassStatus.PUBLISHED:
            raise ConflictError(f"class {cls.class_id} is not published")
        try:
            student, _was_new = self.repo.find_or_create_student(email, request.profile, now=now)
        except ProfileRequired:
            return SignupOutcome(kind="needs_profile")
        with self.repo.transaction():
            self.repo.enroll(student.student_id, cls.class_id, now=now)
            first = min(cls.schedule).isoformat() if cls.schedule else "to be announced"
            entry = self.mailer.render(
                "welcome",
                recipient=student.email,
                context={
                    "student_name": student.name,
                    "class_title": cls.title,
                    "class_description": cls.description,
                    "first_session": first,
                },
                links={"class_page": f"/classes/{cls.class_id}"},
                now=now,
            )
        return SignupOutcome(kind="enrolled", student_id=student.student_id, welcome_email_id=entry.entry_id)

    def teacher_signup(self, submission: ClassSubmission, now: datetime) -> str:
        bad = self._validate(submission)
        if bad:
            raise ValidationError(f"invalid submission fields: {', '.join(bad)}", fields=bad)
        email = submission.teacher_email.strip().casefold()
        for entry in self.repo.pending_submissions():
            p = entry.payload
            if p.get("teacher_email") == email and p.get("title") == submission.title:
                raise ConflictError("a matching submission is already pending review")
        photo_ref = ""
        if submission.photo:
            photo_ref = f"teacher-photos/{email}"
            self.ports.objects.put(photo_ref, submission.photo)
        payload = {
            "teacher_email": email,
            "teacher_name": submission.teacher_name,
            "teacher_bio": submission.teacher_bio,
            "photo_ref": photo_ref,
            "title": submission.title,
            "description": submission.description,
            "grade_range": list(submission.grade_range),
            "schedule": [s.isoformat() for s in submission.schedule],
            "duration_minutes": submission.duration_minutes,
        }
        with self.repo.transaction():
            entry = self.repo.stage_submission(payload, now=now)
            token = sign_action(self.secret, "review", entry.cache_id, now + REVIEW_TOKEN_TTL)
            self.mailer.render(
                "review_request",
                recipient=self.panel_email,
                context={
                    "teacher_name": submission.teacher_name,
                    "teacher_email": email,
                    "class_title": submission.title,
                },
                links={"review": f"/reviews/{entry.cache_id}?token={token}"},
                now=now,
            )
            self.mailer.render(
                "teacher_ack",
                recipient=email,
                context={"teacher_name": submission.teacher_name, "class_title": submission.title},
                now=now,
            )
        return entry.cache_id

    @staticmethod
    def _validate(sub: ClassSubmission) -> list[str]:
        bad = []
        if not EMAIL_RE.match(sub.teacher_email.strip().casefold()):
            bad.append("teacher_email")
        if not sub.teacher_name.strip():
            bad.append("teacher_name")
        if not sub.title.strip():
            bad.append("title")
        if not sub.description.strip():
            bad.append("description")
        lo, hi = sub.grade_range
        if not (0 <= lo <= hi <= 12):
            bad.append("grade_range")
        if not sub.schedule:
            bad.append("schedule")
        if len(sub.photo) > PHOTO_CAP_BYTES:
            bad.append("photo")
        if sub.duration_minutes <= 0:
            bad.append("duration_minutes")
        return bad
