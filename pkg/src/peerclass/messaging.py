"""Email templating, the outbox, and tracked links.

Templates are data files: a `subject:` front-matter line, a `---`
separator, then a body using `{{placeholder}}` substitution and
`[[link:slot]]` tracked-link slots. Rendering wraps every link slot in a
per-entry tracking token and appends an open-pixel link, so opens and
clicks can be resolved back to the exact outbox entry later.
"""
from __future__ import annotations

import hmac
import hashlib
from datetime import datetime
from importlib import resources
from typing import Optional

from .errors import NotFoundError, ValidationError
from .store import InteractionKind, OutboxEntry, Repository, TrackingToken

OPEN_SLOT = "open"
HOME_TARGET = "/"

_PLACEHOLDER_OPEN = "{{"
_PLACEHOLDER_CLOSE = "}}"


def load_templates() -> dict[str, tuple[str, str]]:
    """Read every packaged template file into {template_id: (subject, body)}."""
    templates: dict[str, tuple[str, str]] = {}
    root = resources.files("peerclass") / "templates"
    for item in sorted(root.iterdir(), key=lambda p: p.name):
        if not item.name.endswith(".txt"):
            continue
        text = item.read_text(encoding="utf-8")
        head, _, body = text.partition("\n---\n")
        if not head.startswith("subject:"):
            raise ValidationError(f"template {item.name} missing subject front-matter")
        subject = head[len("subject:"):].strip()
        templates[item.name[:-4]] = (subject, body.strip("\n"))
    return templates


def _substitute(pattern: str, context: dict[str, str]) -> str:
    out = []
    rest = pattern
    while _PLACEHOLDER_OPEN in rest:
        before, _, tail = rest.partition(_PLACEHOLDER_OPEN)
        name, sep, rest = tail.partition(_PLACEHOLDER_CLOSE)
        if not sep:
            raise ValidationError(f"unterminated placeholder in template near {name[:20]!r}")
        if name not in context:
            raise ValidationError(f"missing placeholder value: {name}", fields=[name])
        out.append(before)
        out.append(str(context[name]))
    out.append(rest)
    return "".join(out)


class Mailer:
    def __init__(self, repo: Repository, secret: bytes, base_url: str = "http://localhost:8000"):
        self.repo = repo
        self.secret = secret
        self.base_url = base_url.rstrip("/")
        self.templates = load_templates()

    def _token(self, entry_id: str, slot: str) -> str:
        mac = hmac.new(self.secret, f"{entry_id}:{slot}".encode(), hashlib.sha256)
        return mac.hexdigest()[:16]

    def render(
        self,
        template_id: str,
        recipient: str,
        context: dict[str, str],
        links: Optional[dict[str, str]] = None,
        now: Optional[datetime] = None,
    ) -> OutboxEntry:
        """Render a template into the outbox; `links` maps slot -> target URL."""
        if template_id not in self.templates:
            raise NotFoundError(f"unknown template {template_id}")
        links = dict(links or {})
        subject_pat, body_pat = self.templates[template_id]
        subject = _substitute(subject_pat, context)
        body = _substitute(body_pat, context)

        with self.repo.transaction():
            entry_id = self.repo.next_outbox_id()
            tokens: dict[str, str] = {}
            while "[[link:" in body:
                before, _, tail = body.partition("[[link:")
                slot, sep, after = tail.partition("]]")
                if not sep:
                    raise ValidationError(f"unterminated link slot near {slot[:20]!r}")
                if slot not in links:
                    raise ValidationError(f"missing link target for slot: {slot}", fields=[slot])
                token = self._token(entry_id, slot)
                tokens[slot] = token
                body = f"{before}{self.base_url}/t/{token}{after}"
            pixel = self._token(entry_id, OPEN_SLOT)
            tokens[OPEN_SLOT] = pixel
            body = f"{body}\n\n[pixel] {self.base_url}/t/{pixel}"

            entry = OutboxEntry(
                entry_id=entry_id,
                template_id=template_id,
                recipient=recipient,
                subject=subject,
                body=body,
                tracking_tokens=tokens,
                created_at=now,
            )
            self.repo.append_outbox(entry)
            for slot, token in tokens.items():
                self.repo.put_token(
                    TrackingToken(
                        token=token,
                        entry_id=entry_id,
                        slot=slot,
                        target=links.get(slot, ""),
                        recipient=recipient,
                        template_id=template_id,
                    )
                )
        return entry

    def resolve_click(self, token: str, now: Optional[datetime] = None) -> tuple[str, InteractionKind]:
        """Log the interaction and return the redirect target."""
        rec = self.repo.get("tokens", token)
        if rec is None:
            self.repo.log_interaction(f"anon:{token[:16]}", InteractionKind.PAGE_CLICK, "", at=now)
            return HOME_TARGET, InteractionKind.PAGE_CLICK
        if rec.slot == OPEN_SLOT:
            self.repo.log_interaction(rec.recipient, InteractionKind.EMAIL_OPEN, rec.template_id, at=now)
            return "", InteractionKind.EMAIL_OPEN
        self.repo.log_interaction(rec.recipient, InteractionKind.EMAIL_CLICK, rec.target, at=now)
        return rec.target, InteractionKind.EMAIL_CLICK
