"""Shared builders for workflow-level tests."""
from datetime import timedelta

from peerclass.approval import ApprovalDecision
from peerclass.clock import utc
from peerclass.signup import ClassSubmission, StudentSignupRequest

T0 = utc(2024, 1, 1)


def submit_class(platform, title="Astronomy", teacher_email="tea@x.org", days_out=30, sessions=1):
    now = platform.clock.now()
    sub = ClassSubmission(
        teacher_email=teacher_email,
        teacher_name="Tea Cher",
        title=title,
        description=f"All about {title.lower()}.",
        schedule=[now + timedelta(days=days_out + 7 * i) for i in range(sessions)],
    )
    return platform.signup.teacher_signup(sub, now)


def approve_class(platform, cache_id, tags=("science", "space")):
    decision = ApprovalDecision(cache_id=cache_id, approver_id="panel", decision="approve", tags=list(tags))
    return platform.approval.decide(decision, platform.clock.now())


def publish_class(platform, title="Astronomy", teacher_email="tea@x.org", days_out=30, sessions=1, tags=("science", "space")):
    cache_id = submit_class(platform, title=title, teacher_email=teacher_email, days_out=days_out, sessions=sessions)
    cls = approve_class(platform, cache_id, tags=tags)
    return platform.confirm_ready(cls.class_id)


def enroll_student(platform, class_id, email="kid@x.org", name="Ada", grade=5):
    request = StudentSignupRequest(email=email, class_id=class_id, profile={"name": name, "grade": grade})
    return platform.signup.student_signup(request, platform.clock.now())
