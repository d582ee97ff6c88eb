"""Hostname extraction and source-type classification.

Categories come from a zero-shot chat call per hostname; results are cached
(optionally in a JSON file shared across jobs) and misses are single-flight
so concurrent claims never race duplicate calls for one hostname.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from pathlib import Path
from urllib.parse import urlsplit

from .errors import DomainError, TransportError
from .model import CATEGORY_ALIASES, SourceCategory
from .prompts import load_template

log = logging.getLogger(__name__)


def extract_hostname(url: str) -> str:
    """Full host component of an http(s) url: lowercased, port stripped."""
    parts = urlsplit(url)
    if parts.scheme not in ("http", "https") or not parts.hostname:
        raise DomainError(f"not an absolute http(s) url: {url!r}")
    return parts.hostname


_ALIAS_PATTERNS = [
    (re.compile(r"\b" + re.escape(alias).replace(r"\ ", r"[\s_/]+") + r"\b"), category)
    for alias, category in sorted(
        list(CATEGORY_ALIASES.items()) + [(c.value, c) for c in SourceCategory],
        key=lambda item: -len(item[0]),
    )
]


def normalize_category_response(text: str) -> SourceCategory | None:
    """Map a free-form model response onto the seven-category taxonomy."""
    cleaned = text.strip().strip("\"'`.,;:![]()").lower()
    if not cleaned:
        return None
    direct = cleaned.replace("-", "_")
    try:
        return SourceCategory(direct)
    except ValueError:
        pass
    if direct in CATEGORY_ALIASES:
        return CATEGORY_ALIASES[direct]
    normalized = cleaned.replace("_", " ").replace("/", " ")
    for pattern, category in _ALIAS_PATTERNS:
        if pattern.search(normalized) or pattern.search(cleaned):
            return category
    return None


class CategoryStore:
    """hostname -> category cache; file-backed when given a path."""

    def __init__(self, path: str | Path | None = None):
        self._path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._entries: dict[str, SourceCategory] = {}
        if self._path is not None and self._path.exists():
            raw = json.loads(self._path.read_text(encoding="utf-8"))
            self._entries = {host: SourceCategory(value) for host, value in raw.items()}

    def get(self, hostname: str) -> SourceCategory | None:
        return self._entries.get(hostname)

    def put(self, hostname: str, category: SourceCategory) -> None:
        with self._lock:
            self._entries[hostname] = category
            if self._path is not None:
                payload = {host: cat.value for host, cat in sorted(self._entries.items())}
                self._path.write_text(
                    json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
                )


class SourceCategorizer:
    def __init__(self, gateway, store: CategoryStore | None = None, profile: str = "primary"):
        self._gateway = gateway
        self._store = store or CategoryStore()
        self._profile = profile
        self._inflight: dict[str, threading.Lock] = {}
        self._inflight_lock = threading.Lock()

    def _hostname_lock(self, hostname: str) -> threading.Lock:
        with self._inflight_lock:
            lock = self._inflight.get(hostname)
            if lock is None:
                lock = threading.Lock()
                self._inflight[hostname] = lock
            return lock

    def categorize(self, hostname: str) -> SourceCategory:
        """Classify one hostname; any failure falls back to `other`."""
        if not hostname:
            raise DomainError("hostname must be non-empty")
        hostname = hostname.lower()
        cached = self._store.get(hostname)
        if cached is not None:
            return cached
        with self._hostname_lock(hostname):
            cached = self._store.get(hostname)
            if cached is not None:
                return cached
            prompt = load_template("source_category").format(hostname=hostname)
            try:
                response = self._gateway.chat_complete(
                    self._profile, [{"role": "user", "content": prompt}]
                )
            except TransportError as exc:
                log.warning("categorization failed for %s (low confidence): %s", hostname, exc)
                return SourceCategory.OTHER
            category = normalize_category_response(response)
            if category is None:
                log.info("unrecognized category %r for %s; using other", response, hostname)
                category = SourceCategory.OTHER
            self._store.put(hostname, category)
            return category
