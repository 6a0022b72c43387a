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
)
from .repo import Repository, canonical_tag

__all__ = [
    "ActionKind",
    "ActionState",
    "CacheEntry",
    "CacheState",
    "ClassRecord",
    "ClassStatus",
    "ClassTagLink",
    "EnrollmentLink",
    "FeedbackResponse",
    "InteractionEvent",
    "InteractionKind",
    "MarketingAssets",
    "OutboxEntry",
    "Repository",
    "ScheduledAction",
    "StudentRecord",
    "TagRecord",
    "TeacherRecord",
    "TeachingLink",
    "TrackingToken",
    "canonical_tag",
]
