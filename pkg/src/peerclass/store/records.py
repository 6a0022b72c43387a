"""Record types for every table the platform persists.

All records are plain dataclasses serialized to/from JSON dicts; the
repository owns identity and uniqueness, the records just carry data.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict
from datetime import datetime
from enum import Enum
from typing import Any, Optional


class ClassStatus(str, Enum):
    STAGED = "staged"
    UNDER_REVIEW = "under_review"
    APPROVED = "approved"
    PUBLISHED = "published"
    COMPLETED = "completed"

    @property
    def rank(self) -> int:
        return list(ClassStatus).index(self)


class CacheState(str, Enum):
    PENDING = "pending"
    APPROVED = "approved"
    REJECTED = "rejected"


class ActionKind(str, Enum):
    TEACHER_PROMO = "teacher_promo"
    TARGET_LIST_PROMO = "target_list_promo"
    LOGISTICS_T14D = "logistics_T14d"
    LOGISTICS_T7D = "logistics_T7d"
    LOGISTICS_T3D = "logistics_T3d"
    LOGISTICS_T1D = "logistics_T1d"
    JOIN_NOW_T10M = "join_now_T10m"
    RECORDING_SHARE = "recording_share"
    RATINGS_REQUEST = "ratings_request"
    NEXT_RECS = "next_recs"


class ActionState(str, Enum):
    PENDING = "pending"
    DONE = "done"
    CANCELLED = "cancelled"
    DEAD_LETTER = "dead_letter"


class InteractionKind(str, Enum):
    EMAIL_OPEN = "email_open"
    EMAIL_CLICK = "email_click"
    PAGE_CLICK = "page_click"


def _iso(ts: Optional[datetime]) -> Optional[str]:
    return ts.isoformat() if ts is not None else None


def _ts(raw: Optional[str]) -> Optional[datetime]:
    return datetime.fromisoformat(raw) if raw else None


@dataclass
class StudentRecord:
    student_id: str
    email: str  # stored lowercase, unique
    name: str
    grade_level: int
    demographics: dict[str, str] = field(default_factory=dict)
    created_at: Optional[datetime] = None


@dataclass
class TeacherRecord:
    teacher_id: str
    email: str
    name: str
    bio: str = ""
    photo_ref: str = ""


@dataclass
class ClassRecord:
    class_id: str
    title: str
    description: str
    grade_range: tuple[int, int]
    status: ClassStatus = ClassStatus.STAGED
    schedule: list[datetime] = field(default_factory=list)
    meeting_link: str = ""
    assets_folder: str = ""
    recording_folder: str = ""
    duration_minutes: int = 90


@dataclass
class EnrollmentLink:
    student_id: str
    class_id: str
    enrolled_at: Optional[datetime] = None


@dataclass
class TeachingLink:
    teacher_id: str
    class_id: str


@dataclass
class TagRecord:
    tag_id: str
    label: str  # canonical: trimmed + case-folded


@dataclass
class ClassTagLink:
    class_id: str
    tag_id: str


@dataclass
class CacheEntry:
    cache_id: str
    payload: dict[str, Any]
    submitted_at: Optional[datetime] = None
    state: CacheState = CacheState.PENDING


@dataclass
class FeedbackResponse:
    response_id: str
    student_id: str
    class_id: str
    criterion: str
    rating: int
    free_text: str = ""


@dataclass
class InteractionEvent:
    event_id: str
    user_id: str  # user id or anonymous token
    kind: InteractionKind
    target: str
    at: Optional[datetime] = None


@dataclass
class OutboxEntry:
    entry_id: str
    template_id: str
    recipient: str
    subject: str
    body: str
    tracking_tokens: dict[str, str] = field(default_factory=dict)  # slot -> token
    created_at: Optional[datetime] = None
    delivery_state: str = "queued"  # queued | sent | failed


@dataclass
class TrackingToken:
    token: str
    entry_id: str
    slot: str
    target: str
    recipient: str
    template_id: str


@dataclass
class ScheduledAction:
    action_id: str
    class_id: str
    kind: ActionKind
    due_at: datetime
    state: ActionState = ActionState.PENDING
    session_at: Optional[datetime] = None  # session the action belongs to, if any
    attempts: int = 0


@dataclass
class MarketingAssets:
    class_id: str
    qr_payload: str
    flier_text: str
    folder_link: str


_ENUMS = {
    "status": ClassStatus,
    "state": None,  # resolved per record type below
    "kind": None,
}


def record_to_dict(rec: Any) -> dict[str, Any]:
    d = asdict(rec)
    for k, v in d.items():
        if isinstance(v, datetime):
            d[k] = v.isoformat()
        elif isinstance(v, Enum):
            d[k] = v.value
        elif isinstance(v, list) and v and isinstance(v[0], datetime):
            d[k] = [x.isoformat() for x in v]
        elif isinstance(v, tuple):
            d[k] = list(v)
    return d


def record_from_dict(cls: type, d: dict[str, Any]) -> Any:
    kw = dict(d)
    if cls is StudentRecord:
        kw["created_at"] = _ts(kw.get("created_at"))
    elif cls is ClassRecord:
        kw["status"] = ClassStatus(kw["status"])
        kw["schedule"] = [datetime.fromisoformat(x) for x in kw.get("schedule", [])]
        kw["grade_range"] = tuple(kw["grade_range"])
    elif cls is EnrollmentLink:
        kw["enrolled_at"] = _ts(kw.get("enrolled_at"))
    elif cls is CacheEntry:
        kw["submitted_at"] = _ts(kw.get("submitted_at"))
        kw["state"] = CacheState(kw["state"])
    elif cls is InteractionEvent:
        kw["kind"] = InteractionKind(kw["kind"])
        kw["at"] = _ts(kw.get("at"))
    elif cls is OutboxEntry:
        kw["created_at"] = _ts(kw.get("created_at"))
    elif cls is ScheduledAction:
        kw["kind"] = ActionKind(kw["kind"])
        kw["state"] = ActionState(kw["state"])
        kw["due_at"] = datetime.fromisoformat(kw["due_at"])
        kw["session_at"] = _ts(kw.get("session_at"))
    return cls(**kw)
