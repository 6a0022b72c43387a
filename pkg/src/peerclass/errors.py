"""Exception types shared by every service module."""
from __future__ import annotations


class PlatformError(Exception):
    code = "error"


class ValidationError(PlatformError):
    code = "validation"

    def __init__(self, message: str, fields: list[str] | None = None):
        super().__init__(message)
        self.fields = fields or []


class NotFoundError(PlatformError):
    code = "not_found"


class ConflictError(PlatformError):
    code = "conflict"


class ProfileRequired(PlatformError):
    """New email with no profile: the caller must collect profile fields first."""

    code = "profile_required"


class UnauthorizedError(PlatformError):
    code = "unauthorized"
