"""Ports to external systems, with deterministic in-process stubs.

Real deployments would plug in a video-meeting provider, a shared-drive
API, blob storage, and an SMTP relay; the stubs give every port a
seed-deterministic, fully observable behavior for tests.
"""
from __future__ import annotations

import hashlib
from typing import Protocol

from .store.records import OutboxEntry


class MeetingLinkPort(Protocol):
    def create(self, class_id: str) -> str: ...


class SharedFolderPort(Protocol):
    def create_folder(self, name: str) -> str: ...

    def add_file(self, folder: str, name: str, data: bytes) -> None: ...


class ObjectStorePort(Protocol):
    def put(self, key: str, data: bytes) -> str: ...

    def exists(self, key: str) -> bool: ...


class EmailPort(Protocol):
    def send(self, entry: OutboxEntry) -> bool: ...


def _nonce(seed: int, *parts: str) -> str:
    h = hashlib.sha256(("|".join(parts) + f"|{seed}").encode())
    return h.hexdigest()[:10]


class StubMeetingLinks:
    """Idempotent per class_id; URL carries a seed-derived nonce."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.created: dict[str, str] = {}

    def create(self, class_id: str) -> str:
        if class_id not in self.created:
            self.created[class_id] = f"meet://class/{class_id}/{_nonce(self.seed, 'meet', class_id)}"
        return self.created[class_id]


class StubSharedFolders:
    def __init__(self, seed: int = 0):
        self.seed = seed
        self.folders: dict[str, dict[str, bytes]] = {}

    def create_folder(self, name: str) -> str:
        url = f"folder://{name}/{_nonce(self.seed, 'folder', name)}"
        self.folders.setdefault(url, {})
        return url

    def add_file(self, folder: str, name: str, data: bytes) -> None:
        self.folders.setdefault(folder, {})[name] = data


class StubObjectStore:
    def __init__(self):
        self.blobs: dict[str, bytes] = {}

    def put(self, key: str, data: bytes) -> str:
        self.blobs[key] = data
        return key

    def exists(self, key: str) -> bool:
        return key in self.blobs


class StubEmailer:
    """Accepts everything; `fail_next(n)` scripts transient failures."""

    def __init__(self):
        self.sent: list[OutboxEntry] = []
        self._failures = 0

    def fail_next(self, n: int) -> None:
        self._failures = n

    def send(self, entry: OutboxEntry) -> bool:
        if self._failures > 0:
            self._failures -= 1
            return False
        self.sent.append(entry)
        return True


class Ports:
    """Bundle of all external ports a service build wires together."""

    def __init__(
        self,
        meeting: MeetingLinkPort | None = None,
        folders: SharedFolderPort | None = None,
        objects: ObjectStorePort | None = None,
        email: EmailPort | None = None,
        seed: int = 0,
    ):
        self.meeting = meeting or StubMeetingLinks(seed)
        self.folders = folders or StubSharedFolders(seed)
        self.objects = objects or StubObjectStore()
        self.email = email or StubEmailer()
