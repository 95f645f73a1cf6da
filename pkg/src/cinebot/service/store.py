"""File-backed session persistence: one snapshot plus one transcript log per
session. Snapshots are written atomically (tmp + rename) so a crash never
leaves a half-written state behind."""

from __future__ import annotations

import json
import os
import re
import threading
from pathlib import Path
from typing import Any

from ..errors import SessionNotFoundError

_ID_RE = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


class SessionStore:
    def __init__(self, directory: str | Path):
        self._dir = Path(directory)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _check(self, session_id: str) -> str:
        if not _ID_RE.match(session_id):
            raise SessionNotFoundError(f"bad session id {session_id!r}")
        return session_id

    def _snapshot_path(self, session_id: str) -> Path:
        return self._dir / f"{self._check(session_id)}.json"

    def _transcript_path(self, session_id: str) -> Path:
        return self._dir / f"{self._check(session_id)}.transcript.jsonl"

    def exists(self, session_id: str) -> bool:
        return self._snapshot_path(session_id).exists()

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self._dir.glob("*.json"))

    def save_snapshot(self, session_id: str, snapshot: dict[str, Any]) -> None:
        path = self._snapshot_path(session_id)
        tmp = path.with_suffix(".json.tmp")
        with self._lock:
            tmp.write_text(
                json.dumps(snapshot, ensure_ascii=False, indent=None), encoding="utf-8"
            )
            os.replace(tmp, path)

    def read_snapshot(self, session_id: str) -> dict[str, Any]:
        path = self._snapshot_path(session_id)
        if not path.exists():
            raise SessionNotFoundError(f"no session {session_id!r}")
        return json.loads(path.read_text(encoding="utf-8"))

    def append_transcript(self, session_id: str, record: dict[str, Any]) -> None:
        with self._lock:
            with self._transcript_path(session_id).open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                fh.flush()

    def read_transcript(self, session_id: str) -> list[dict[str, Any]]:
        path = self._transcript_path(session_id)
        if not path.exists():
            if not self.exists(session_id):
                raise SessionNotFoundError(f"no session {session_id!r}")
            return []
        lines = path.read_text(encoding="utf-8").splitlines()
        return [json.loads(line) for line in lines if line.strip()]
