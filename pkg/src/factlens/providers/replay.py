"""Deterministic record/replay store for provider responses.

Entries live in a JSON-lines file, one object per line:
``{"kind": ..., "key": ..., "payload": ..., "response": ...}``.  The key is
the SHA-256 hex digest of the canonicalized request (sorted keys, compact
separators, UTF-8), so semantically identical requests always share a key.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path
from typing import Any


def canonical_payload(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def request_key(kind: str, payload: Any) -> str:
    material = canonical_payload({"kind": kind, "payload": payload})
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


class ReplayStore:
    """Key-addressed response store; concurrent reads, serialized writes."""

    def __init__(self, path: str | Path | None = None):
        self._path = Path(path) if path is not None else None
        self._entries: dict[str, dict[str, Any]] = {}
        self._write_lock = threading.Lock()
        if self._path is not None and self._path.exists():
            with self._path.open("r", encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if not line:
                        continue
                    record = json.loads(line)
                    self._entries[record["key"]] = record

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key: str) -> dict[str, Any] | None:
        return self._entries.get(key)

    def put(self, kind: str, key: str, payload: Any, response: Any) -> None:
        record = {"kind": kind, "key": key, "payload": payload, "response": response}
        with self._write_lock:
            if key in self._entries:
                return
            if self._path is not None:
                with self._path.open("a", encoding="utf-8") as handle:
                    handle.write(canonical_payload(record) + "\n")
                    handle.flush()
            self._entries[key] = record
