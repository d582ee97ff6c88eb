"""Live HTTP transport behind the gateway.

Chat and embeddings follow the widely used chat-completions and embeddings
JSON schemas; search expects a JSON endpoint returning an "organic" array of
result objects.  Transient failures are retried twice with backoff.
"""

from __future__ import annotations

import logging
import time
from typing import Any, Protocol

import httpx

from ..errors import FetchBlocked, FetchTimeout, RateLimited, TransportError
from .settings import ProviderSettings

log = logging.getLogger(__name__)

_RETRIES = 2
_BACKOFF_SECONDS = 1.0


class Transport(Protocol):
    """The four live capabilities the gateway may call out to."""

    def chat(self, payload: dict[str, Any]) -> str: ...

    def embed(self, payload: dict[str, Any]) -> list[list[float]]: ...

    def search(self, payload: dict[str, Any]) -> list[dict[str, str]]: ...

    def fetch(self, payload: dict[str, Any]) -> str: ...


class HttpTransport:
    def __init__(self, settings: ProviderSettings, client: httpx.Client | None = None):
        self._settings = settings
        self._client = client or httpx.Client(follow_redirects=True)

    def close(self) -> None:
        self._client.close()

    def _post_json(self, url: str, body: dict, headers: dict[str, str]) -> dict:
        last_error: Exception | None = None
        for attempt in range(_RETRIES + 1):
            try:
                response = self._client.post(url, json=body, headers=headers, timeout=60.0)
                if response.status_code == 429:
                    raise RateLimited(f"rate limited by {url}")
                if response.status_code >= 500:
                    raise TransportError(f"{url} returned {response.status_code}")
                response.raise_for_status()
                return response.json()
            except (httpx.TransportError, RateLimited, TransportError) as exc:
                last_error = exc
                if attempt < _RETRIES:
                    time.sleep(_BACKOFF_SECONDS * (2**attempt))
            except httpx.HTTPStatusError as exc:
                raise TransportError(str(exc)) from exc
        if isinstance(last_error, RateLimited):
            raise last_error
        raise TransportError(str(last_error))

    def _require(self, value: str | None, name: str) -> str:
        if not value:
            raise TransportError(f"{name} is not configured")
        return value

    def chat(self, payload: dict[str, Any]) -> str:
        base = self._require(self._settings.llm_base_url, "LLM_BASE_URL")
        headers = {}
        if self._settings.llm_api_key:
            headers["Authorization"] = f"Bearer {self._settings.llm_api_key}"
        data = self._post_json(f"{base.rstrip('/')}/chat/completions", dict(payload), headers)
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed chat response: {exc}") from exc

    def embed(self, payload: dict[str, Any]) -> list[list[float]]:
        base = self._require(self._settings.embed_base_url, "EMBED_BASE_URL")
        headers = {}
        if self._settings.llm_api_key:
            headers["Authorization"] = f"Bearer {self._settings.llm_api_key}"
        data = self._post_json(f"{base.rstrip('/')}/embeddings", dict(payload), headers)
        try:
            items = sorted(data["data"], key=lambda item: item["index"])
            return [list(map(float, item["embedding"])) for item in items]
        except (KeyError, TypeError) as exc:
            raise TransportError(f"malformed embeddings response: {exc}") from exc

    def search(self, payload: dict[str, Any]) -> list[dict[str, str]]:
        base = self._require(self._settings.search_base_url, "SEARCH_BASE_URL")
        headers = {}
        if self._settings.search_api_key:
            headers["X-API-KEY"] = self._settings.search_api_key
        data = self._post_json(base, dict(payload), headers)
        results = []
        for item in data.get("organic", []):
            url = item.get("url") or item.get("link") or ""
            if not url:
                continue
            results.append(
                {
                    "url": url,
                    "title": item.get("title", ""),
                    "snippet": item.get("snippet", ""),
                }
            )
        return results

    def fetch(self, payload: dict[str, Any]) -> str:
        url = payload["url"]
        try:
            with self._client.stream("GET", url, timeout=self._settings.fetch_timeout) as response:
                if response.status_code in (401, 403, 406, 429) or 400 <= response.status_code < 500:
                    raise FetchBlocked(f"{url} returned {response.status_code}")
                if response.status_code >= 500:
                    raise TransportError(f"{url} returned {response.status_code}")
                chunks: list[bytes] = []
                size = 0
                for chunk in response.iter_bytes():
                    size += len(chunk)
                    chunks.append(chunk)
                    if size >= self._settings.fetch_max_bytes:
                        log.warning("truncating %s at %d bytes", url, size)
                        break
                body = b"".join(chunks)[: self._settings.fetch_max_bytes]
                encoding = response.encoding or "utf-8"
                return body.decode(encoding, errors="replace")
        except httpx.TimeoutException as exc:
            raise FetchTimeout(f"{url} timed out") from exc
        except httpx.TransportError as exc:
            raise TransportError(str(exc)) from exc
