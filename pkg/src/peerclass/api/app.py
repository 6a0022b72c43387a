"""HTTP surface: every service operation behind a JSON envelope."""
from __future__ import annotations

import base64
from datetime import datetime

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, RedirectResponse, Response

from .. import __version__
from ..approval import ApprovalDecision
from ..errors import (
    ConflictError,
    NotFoundError,
    PlatformError,
    UnauthorizedError,
    ValidationError,
)
from ..service import Platform
from ..signup import ClassSubmission, StudentSignupRequest
from ..store import ClassStatus
from .schemas import (
    ClockAdvanceBody,
    DecisionBody,
    FeedbackBody,
    StudentSignupBody,
    SubmissionBody,
    err,
    ok,
)

# 1x1 transparent GIF served for open-pixel hits
_PIXEL = base64.b64decode("R0lGODlhAQABAIAAAAAAAP///yH5BAEAAAAALAAAAAABAAEAAAIBRAA7")

_STATUS = {
    ValidationError: 400,
    UnauthorizedError: 401,
    NotFoundError: 404,
    ConflictError: 409,
}


def create_app(platform: Platform) -> FastAPI:
    app = FastAPI(title="peerclass", version=__version__)
    app.state.platform = platform

    @app.exception_handler(PlatformError)
    async def platform_error(_req: Request, exc: PlatformError):
        status = _STATUS.get(type(exc), 400)
        fields = getattr(exc, "fields", None)
        return JSONResponse(status_code=status, content=err(exc.code, str(exc), fields))

    @app.exception_handler(RequestValidationError)
    async def body_error(_req: Request, exc: RequestValidationError):
        fields = sorted({str(e["loc"][-1]) for e in exc.errors()})
        return JSONResponse(status_code=400, content=err("validation", "malformed request body", fields))

    @app.get("/health")
    def health():
        return ok({"version": __version__, "roster_hash": platform.roster_hash()})

    @app.post("/students/signup")
    def student_signup(body: StudentSignupBody):
        request = StudentSignupRequest(
            email=body.email,
            class_id=body.class_id,
            profile=body.profile.model_dump() if body.profile else None,
        )
        outcome = platform.signup.student_signup(request, platform.clock.now())
        return ok(
            {
                "outcome": outcome.kind,
                "student_id": outcome.student_id,
                "welcome_email_id": outcome.welcome_email_id,
            }
        )

    @app.post("/teachers/submissions")
    def teacher_submission(body: SubmissionBody):
        submission = ClassSubmission(
            teacher_email=body.teacher_email,
            teacher_name=body.teacher_name,
            teacher_bio=body.teacher_bio,
            title=body.title,
            description=body.description,
            grade_range=tuple(body.grade_range),
            schedule=[datetime.fromisoformat(s) for s in body.schedule],
            duration_minutes=body.duration_minutes,
            photo=base64.b64decode(body.photo_b64) if body.photo_b64 else b"",
        )
        cache_id = platform.signup.teacher_signup(submission, platform.clock.now())
        return ok({"cache_id": cache_id})

    @app.get("/reviews/pending")
    def pending_reviews():
        entries = platform.repo.pending_submissions()
        return ok(
            [
                {
                    "cache_id": e.cache_id,
                    "submitted_at": e.submitted_at.isoformat() if e.submitted_at else None,
                    "payload": {k: v for k, v in e.payload.items() if k != "photo_ref"},
                }
                for e in entries
            ]
        )

    @app.post("/reviews/{cache_id}/decision")
    def decide_review(cache_id: str, body: DecisionBody):
        platform.verify_token(body.token, "review", cache_id)
        decision = ApprovalDecision(
            cache_id=cache_id,
            approver_id=body.approver_id,
            decision=body.decision,
            tags=body.tags,
            note=body.note,
        )
        cls = platform.approval.decide(decision, platform.clock.now())
        return ok({"class_id": cls.class_id if cls else None, "decision": body.decision})

    @app.post("/classes/{class_id}/confirm-ready")
    def confirm_ready(class_id: str, token: str):
        platform.verify_token(token, "confirm", class_id)
        cls = platform.confirm_ready(class_id)
        return ok({"class_id": cls.class_id, "status": cls.status.value, "meeting_link": cls.meeting_link})

    @app.get("/classes")
    def catalog():
        counts = platform.repo.signup_counts()
        out = []
        for cls in platform.repo.published_classes():
            if cls.status != ClassStatus.PUBLISHED:
                continue
            teacher = platform.repo.teacher_for_class(cls.class_id)
            out.append(
                {
                    "class_id": cls.class_id,
                    "title": cls.title,
                    "description": cls.description,
                    "teacher_name": teacher.name if teacher else "",
                    "grade_range": list(cls.grade_range),
                    "schedule": [s.isoformat() for s in cls.schedule],
                    "tags": sorted(platform.repo.tags_for_class(cls.class_id)),
                    "signup_count": counts.get(cls.class_id, 0),
                }
            )
        return ok(out)

    @app.get("/students/{student_id}/recommendations")
    def recommendations(student_id: str, n: int = 3):
        if platform.repo.get("students", student_id) is None:
            raise NotFoundError(f"unknown student {student_id}")
        ranked, fallback = platform.recsys.top_n(student_id, n)
        return ok(
            {
                "student_id": student_id,
                "fallback_popularity": fallback,
                "recommendations": [{"class_id": cid, "score": score} for cid, score in ranked],
            }
        )

    @app.post("/feedback")
    def feedback(body: FeedbackBody):
        response_id = platform.repo.record_feedback(
            body.student_id, body.class_id, body.criterion, body.rating, body.free_text
        )
        return ok({"response_id": response_id})

    @app.get("/t/{token}")
    def track(token: str):
        target, kind = platform.mailer.resolve_click(token, now=platform.clock.now())
        if kind.value == "email_open":
            return Response(content=_PIXEL, media_type="image/gif")
        return RedirectResponse(url=target or "/", status_code=302)

    if platform.config.admin_enabled:

        @app.get("/admin/outbox")
        def outbox():
            return ok(
                [
                    {
                        "entry_id": e.entry_id,
                        "template_id": e.template_id,
                        "recipient": e.recipient,
                        "subject": e.subject,
                        "body": e.body,
                        "created_at": e.created_at.isoformat() if e.created_at else None,
                        "delivery_state": e.delivery_state,
                    }
                    for e in platform.repo.outbox_entries()
                ]
            )

        @app.post("/admin/clock/advance")
        def clock_advance(body: ClockAdvanceBody):
            executed = platform.advance_clock(body.seconds)
            return ok({"now": platform.clock.now().isoformat(), "executed_actions": executed})

    return app
