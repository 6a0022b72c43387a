"""Signed action links embedded in emails.

A token authorizes one (action, entity) pair until its expiry; the HMAC
covers all three fields so a link cannot be replayed for a different
entity or action.
"""
from __future__ import annotations

import base64
import hashlib
import hmac
from datetime import datetime, timezone

from .errors import UnauthorizedError


def _sig(secret: bytes, action: str, entity_id: str, expires: int) -> str:
    mac = hmac.new(secret, f"{action}|{entity_id}|{expires}".encode(), hashlib.sha256)
    return base64.urlsafe_b64encode(mac.digest()[:15]).decode()


def sign_action(secret: bytes, action: str, entity_id: str, expires_at: datetime) -> str:
    expires = int(expires_at.timestamp())
    return f"{action}.{entity_id}.{expires}.{_sig(secret, action, entity_id, expires)}"


def verify_action(secret: bytes, token: str, expected_action: str, entity_id: str, now: datetime) -> None:
    try:
        action, ent, raw_exp, sig = token.split(".")
        expires = int(raw_exp)
    except ValueError:
        raise UnauthorizedError("malformed action token") from None
    if not hmac.compare_digest(sig, _sig(secret, action, ent, expires)):
        raise UnauthorizedError("bad token signature")
    if action != expected_action or ent != entity_id:
        raise UnauthorizedError("token does not authorize this action")
    if now.replace(tzinfo=now.tzinfo or timezone.utc).timestamp() > expires:
        raise UnauthorizedError("token expired")
