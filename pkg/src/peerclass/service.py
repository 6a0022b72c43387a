"""Wires the store, ports, and services into one platform instance."""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import timedelta
from typing import Optional

from .approval import ApprovalService
from .auth import verify_action
from .clock import Clock, SystemClock, VirtualClock, utc
from .coordination import Coordinator
from .errors import ValidationError
from .messaging import Mailer
from .ports import Ports
from .recsys import ModelConfig, RecsysService, RosterSnapshot
from .signup import SignupService
from .store import ClassRecord, Repository


@dataclass
class PlatformConfig:
    secret: str = "dev-secret"
    panel_email: str = "review-panel@example.org"
    base_url: str = "http://localhost:8000"
    store_path: Optional[str] = None
    admin_enabled: bool = False  # exposes /admin/* and the virtual clock
    seed: int = 0
    model: ModelConfig = field(default_factory=ModelConfig)


class Platform:
    def __init__(self, config: Optional[PlatformConfig] = None, repo: Optional[Repository] = None):
        self.config = config or PlatformConfig()
        self.clock: Clock = VirtualClock(utc(2024, 1, 1)) if self.config.admin_enabled else SystemClock()
        self.repo = repo if repo is not None else Repository(self.config.store_path)
        self.ports = Ports(seed=self.config.seed)
        secret = self.config.secret.encode()
        self.mailer = Mailer(self.repo, secret=secret, base_url=self.config.base_url)
        self.signup = SignupService(self.repo, self.mailer, self.ports, self.config.panel_email, secret)
        self.approval = ApprovalService(self.repo, self.mailer, self.ports, secret)
        self.recsys = RecsysService(self.repo, self.config.model)
        self.coordinator = Coordinator(self.repo, self.mailer, self.ports, self.recsys)
        self._secret = secret

    def verify_token(self, token: str, action: str, entity_id: str) -> None:
        verify_action(self._secret, token, action, entity_id, self.clock.now())

    def confirm_ready(self, class_id: str) -> ClassRecord:
        """Publish the class and, when it has future sessions, schedule its
        marketing assets and reminder cadence."""
        now = self.clock.now()
        cls = self.approval.teacher_confirm_ready(class_id, now)
        if any(s > now for s in cls.schedule):
            self.coordinator.on_class_published(class_id, now)
        return cls

    def advance_clock(self, seconds: float) -> list[str]:
        if not isinstance(self.clock, VirtualClock):
            raise ValidationError("clock advance requires the admin (virtual clock) build")
        now = self.clock.advance(timedelta(seconds=seconds))
        return self.coordinator.tick(now)

    def roster_hash(self) -> str:
        return RosterSnapshot.from_repo(self.repo).roster_hash
