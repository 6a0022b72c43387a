"""Request/response bodies for the HTTP surface."""
from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class Envelope(BaseModel):
    ok: bool
    data: Optional[Any] = None
    error: Optional[dict] = None


def ok(data: Any) -> dict:
    return {"ok": True, "data": data}


def err(code: str, message: str, fields: Optional[list[str]] = None) -> dict:
    body: dict[str, Any] = {"code": code, "message": message}
    if fields:
        body["fields"] = fields
    return {"ok": False, "error": body}


class ProfileBody(BaseModel):
    name: str
    grade: int = Field(ge=0, le=12)
    demographics: dict[str, str] = Field(default_factory=dict)


class StudentSignupBody(BaseModel):
    email: str
    class_id: str
    profile: Optional[ProfileBody] = None


class SubmissionBody(BaseModel):
    teacher_email: str
    teacher_name: str
    teacher_bio: str = ""
    title: str
    description: str
    grade_range: tuple[int, int] = (0, 12)
    schedule: list[str]  # ISO-8601 instants
    duration_minutes: int = 90
    photo_b64: str = ""


class DecisionBody(BaseModel):
    approver_id: str
    decision: str  # approve | reject
    tags: list[str] = Field(default_factory=list)
    note: str = ""
    token: str


class FeedbackBody(BaseModel):
    student_id: str
    class_id: str
    criterion: str
    rating: int
    free_text: str = ""


class ClockAdvanceBody(BaseModel):
    seconds: float = Field(gt=0)
