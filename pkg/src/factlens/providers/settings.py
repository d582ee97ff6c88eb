"""Provider endpoint configuration.

Live endpoints are resolved from environment variables (LLM_API_KEY,
LLM_BASE_URL, EMBED_BASE_URL, SEARCH_API_KEY, SEARCH_BASE_URL) and an
optional JSON file that maps chat profiles to concrete model names.  No
vendor is hardcoded; the two profiles "primary" and "secondary" abstract
whichever hosted models the deployment points at.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..errors import DomainError

DEFAULT_PROFILES = {"primary": "chat-primary", "secondary": "chat-secondary"}


@dataclass(frozen=True)
class ProviderSettings:
    llm_base_url: str | None = None
    llm_api_key: str | None = None
    embed_base_url: str | None = None
    search_base_url: str | None = None
    search_api_key: str | None = None
    chat_profiles: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_PROFILES))
    embed_model: str = "embed-default"
    fetch_timeout: float = 10.0
    fetch_max_bytes: int = 2 * 1024 * 1024
    per_host_fetch_limit: int = 2

    def chat_model(self, profile: str) -> str:
        try:
            return self.chat_profiles[profile]
        except KeyError as exc:
            raise DomainError(f"unknown llm profile {profile!r}") from exc

    @classmethod
    def from_env(cls, providers_file: str | Path | None = None) -> "ProviderSettings":
        settings = cls(
            llm_base_url=os.environ.get("LLM_BASE_URL"),
            llm_api_key=os.environ.get("LLM_API_KEY"),
            embed_base_url=os.environ.get("EMBED_BASE_URL"),
            search_base_url=os.environ.get("SEARCH_BASE_URL"),
            search_api_key=os.environ.get("SEARCH_API_KEY"),
        )
        if providers_file is not None:
            raw = json.loads(Path(providers_file).read_text(encoding="utf-8"))
            overrides = {k: v for k, v in raw.items() if v is not None}
            profiles = dict(settings.chat_profiles)
            profiles.update(overrides.pop("chat_profiles", {}))
            settings = replace(settings, chat_profiles=profiles, **overrides)
        return settings
