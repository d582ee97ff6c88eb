"""Uniform access to chat, embeddings, web search, and page fetch.

Every request is canonicalized and keyed; depending on the mode the gateway
serves responses live (with an in-memory cache), records them into a replay
store, or replays them with zero network activity.  Fetch failures are
recorded as data so that replayed runs reproduce them; other provider errors
propagate.
"""

from __future__ import annotations

import logging
import math
import threading
from enum import Enum
from typing import Any, Callable, NamedTuple
from urllib.parse import urlsplit

from ..errors import (
    DomainError,
    FetchBlocked,
    FetchTimeout,
    ProviderError,
    ReplayMiss,
    TransportError,
)
from .replay import ReplayStore, request_key
from .settings import ProviderSettings
from .transport import HttpTransport, Transport

log = logging.getLogger(__name__)


class GatewayMode(str, Enum):
    LIVE = "live"
    RECORD = "record"
    REPLAY = "replay"


class SearchResult(NamedTuple):
    url: str
    title: str
    snippet: str


_FETCH_ERRORS: dict[str, type[ProviderError]] = {
    "FetchBlocked": FetchBlocked,
    "FetchTimeout": FetchTimeout,
    "TransportError": TransportError,
}


class ProviderGateway:
    """Thread-safe facade over the four external capabilities."""

    def __init__(
        self,
        settings: ProviderSettings | None = None,
        *,
        mode: GatewayMode = GatewayMode.REPLAY,
        store: ReplayStore | None = None,
        transport: Transport | None = None,
    ):
        self.settings = settings or ProviderSettings()
        self.mode = GatewayMode(mode)
        if self.mode in (GatewayMode.RECORD, GatewayMode.REPLAY) and store is None:
            raise DomainError(f"{self.mode.value} mode requires a replay store")
        self._store = store
        if self.mode is GatewayMode.REPLAY:
            self._transport: Transport | None = None
        else:
            self._transport = transport or HttpTransport(self.settings)
        self._memory: dict[str, Any] = {}
        self._memory_lock = threading.Lock()
        self._host_slots: dict[str, threading.Semaphore] = {}
        self._host_lock = threading.Lock()
        self._counter_lock = threading.Lock()
        self.transport_calls = 0

    def _count_call(self) -> None:
        with self._counter_lock:
            self.transport_calls += 1

    def _execute(self, kind: str, payload: Any, call: Callable[[], Any]) -> Any:
        """Resolve one request through the mode's cache discipline.

        The callable performs the live transport call and returns the
        response envelope to cache; it is never invoked in replay mode.
        """
        key = request_key(kind, payload)
        if self.mode is GatewayMode.REPLAY:
            entry = self._store.get(key)  # type: ignore[union-attr]
            if entry is None:
                raise ReplayMiss(kind, key)
            return entry["response"]
        if self.mode is GatewayMode.RECORD:
            entry = self._store.get(key)  # type: ignore[union-attr]
            if entry is not None:
                return entry["response"]
            response = call()
            self._store.put(kind, key, payload, response)  # type: ignore[union-attr]
            return response
        with self._memory_lock:
            if key in self._memory:
                return self._memory[key]
        response = call()
        with self._memory_lock:
            self._memory[key] = response
        return response

    # -- chat ---------------------------------------------------------------

    def chat_complete(self, profile: str, messages: list) -> str:
        """One deterministic chat completion (temperature 0)."""
        model = self.settings.chat_model(profile)
        normalized = [
            {"role": m[0], "content": m[1]} if isinstance(m, (tuple, list)) else dict(m)
            for m in messages
        ]
        payload = {"model": model, "messages": normalized, "temperature": 0}

        def call() -> Any:
            self._count_call()
            return {"ok": True, "value": self._transport.chat(payload)}

        response = self._execute("chat", payload, call)
        return response["value"]

    # -- embeddings -----------------------------------------------------------

    def embed(self, texts: list[str]) -> list[list[float]]:
        """Embed texts; one unit-normalized vector per input."""
        if not texts:
            raise DomainError("embed requires a non-empty list of texts")
        if any(not t for t in texts):
            raise DomainError("embed texts must be non-empty")
        payload = {"model": self.settings.embed_model, "input": list(texts)}

        def call() -> Any:
            self._count_call()
            return {"ok": True, "value": self._transport.embed(payload)}

        response = self._execute("embed", payload, call)
        vectors = response["value"]
        if len(vectors) != len(texts):
            raise ProviderError("embedding count does not match input count")
        if len({len(v) for v in vectors}) > 1:
            raise ProviderError("embedding dimensions are inconsistent")
        return [_unit(vector) for vector in vectors]

    # -- web search -----------------------------------------------------------

    def search(self, query: str, top_n: int) -> list[SearchResult]:
        """Top-n search results, deduplicated by url in provider order."""
        if not query.strip():
            raise DomainError("search query must be non-empty")
        if top_n < 1:
            raise DomainError("top_n must be >= 1")
        payload = {"q": query, "num": top_n}

        def call() -> Any:
            self._count_call()
            return {"ok": True, "value": self._transport.search(payload)}

        response = self._execute("search", payload, call)
        seen: set[str] = set()
        results: list[SearchResult] = []
        for item in response["value"]:
            url = item.get("url", "")
            if not url or url in seen:
                continue
            seen.add(url)
            results.append(SearchResult(url, item.get("title", ""), item.get("snippet", "")))
            if len(results) == top_n:
                break
        return results

    # -- page fetch -----------------------------------------------------------

    def fetch_page(self, url: str) -> str:
        """Fetch one page body; failures are recorded and replayed as errors."""
        scheme = urlsplit(url).scheme
        if scheme not in ("http", "https") or not urlsplit(url).netloc:
            raise DomainError(f"not a fetchable url: {url!r}")

        def call() -> Any:
            host = urlsplit(url).hostname or ""
            with self._host_slot(host):
                try:
                    self._count_call()
                    return {"ok": True, "value": self._transport.fetch({"url": url})}
                except (FetchBlocked, FetchTimeout, TransportError) as exc:
                    return {
                        "ok": False,
                        "error": type(exc).__name__,
                        "message": str(exc),
                    }

        response = self._execute("fetch", {"url": url}, call)
        if response.get("ok", True):
            return response["value"]
        error_type = _FETCH_ERRORS.get(response.get("error", ""), TransportError)
        raise error_type(response.get("message", "recorded fetch failure"))

    def _host_slot(self, host: str) -> threading.Semaphore:
        with self._host_lock:
            slot = self._host_slots.get(host)
            if slot is None:
                slot = threading.Semaphore(self.settings.per_host_fetch_limit)
                self._host_slots[host] = slot
            return slot


def _unit(vector: list[float]) -> list[float]:
    norm = math.sqrt(sum(x * x for x in vector))
    if norm == 0:
        raise ProviderError("embedding provider returned a zero vector")
    return [x / norm for x in vector]
