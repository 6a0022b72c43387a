"""Class review, promotion, and publication."""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Optional

from .auth import sign_action
from .errors import ConflictError, ValidationError
from .messaging import Mailer
from .ports import Ports
from .store import CacheState, ClassRecord, ClassStatus, Repository

CONFIRM_TOKEN_TTL = timedelta(days=30)


@dataclass
class ApprovalDecision:
    cache_id: str
    approver_id: str
    decision: str  # "approve" | "reject"
    tags: list[str] = field(default_factory=list)
    note: str = ""


class ApprovalService:
    def __init__(self, repo: Repository, mailer: Mailer, ports: Ports, secret: bytes):
        self.repo = repo
        self.mailer = mailer
        self.ports = ports
        self.secret = secret

    def decide(self, decision: ApprovalDecision, now: datetime) -> Optional[ClassRecord]:
        entry = self.repo.get("cache", decision.cache_id)
        if entry is None or entry.state != CacheState.PENDING:
            raise ConflictError(f"submission {decision.cache_id} is not pending")
        if decision.decision == "approve":
            if not [t for t in decision.tags if t.strip()]:
                raise ValidationError("approval requires at least one tag", fields=["tags"])
            with self.repo.transaction():
                teacher, cls = self.repo.promote_submission(decision.cache_id, decision.tags)
                token = sign_action(self.secret, "confirm", cls.class_id, now + CONFIRM_TOKEN_TTL)
                self.mailer.render(
                    "class_approved",
                    recipient=teacher.email,
                    context={"teacher_name": teacher.name, "class_title": cls.title},
                    links={"confirm": f"/classes/{cls.class_id}/confirm-ready?token={token}"},
                    now=now,
                )
            return cls
        if decision.decision == "reject":
            with self.repo.transaction():
                entry.state = CacheState.REJECTED
                self.mailer.render(
                    "class_rejected",
                    recipient=entry.payload["teacher_email"],
                    context={
                        "teacher_name": entry.payload.get("teacher_name", ""),
                        "class_title": entry.payload.get("title", ""),
                        "note": decision.note,
                    },
                    now=now,
                )
            return None
        raise ValidationError(f"unknown decision {decision.decision!r}", fields=["decision"])

    def teacher_confirm_ready(self, class_id: str, now: datetime) -> ClassRecord:
        """Create the meeting link and make the class catalog-visible."""
        cls = self.repo.get_class(class_id)
        if cls.status != ClassStatus.APPROVED:
            raise ConflictError(f"class {class_id} is {cls.status.value}, expected approved")
        with self.repo.transaction():
            cls.meeting_link = self.ports.meeting.create(class_id)
            self.repo.set_class_status(class_id, ClassStatus.PUBLISHED)
        return cls
