"""Deterministic scripted provider backend used to record bundled fixtures.

Implements the gateway Transport protocol with rule-based responses: claim
lists come from a per-sentence table, search results and page bodies from
scenario tables (with a hash-driven generic path for the eval corpus), and
judgment verdicts are derived from stance markers embedded in the evidence
text.  Everything is a pure function of the request, so recorded fixtures
are stable across regenerations.
"""

from __future__ import annotations

import hashlib
import re

from factlens.errors import FetchBlocked

SUPPORT_MARKER = "confirmed"
DISPUTE_MARKER = "disputed"

_CLAIM_TARGET = re.compile(r"Break the following sentence into atomic claims: S\d+: (.*)")
_HOSTNAME = re.compile(r"Hostname:\s*(\S+)\s*$", re.MULTILINE)

_FILLER = [
    "The plant has a long history across several regions and climates.",
    "Farmers describe seasonal harvests that vary with rainfall and soil.",
    "Local markets sell dozens of preparations at a wide range of prices.",
    "Historical records mention its trade along coastal routes.",
    "Preparation methods differ between households and regions.",
    "Enthusiasts trade advice about sourcing and storage conditions.",
    "Several cookbooks include it in both savory and sweet recipes.",
    "Museums occasionally display antique tools associated with it.",
    "Travel writers have documented regional festivals celebrating it.",
    "Export figures fluctuated sharply during the last decade.",
]

_GENERIC_HOSTS = [
    ("www.eurekalert.org", "news"),
    ("www.sciencedaily.com", "news"),
    ("en.wikipedia.org", "wiki"),
    ("www.cdc.gov", "government_website"),
    ("www.ncbi.nlm.nih.gov", "government_website"),
    ("healthnotes.blogspot.com", "blog"),
    ("www.medscape.com", "scientific_medical_article"),
    ("www.reddit.com", "social_media"),
]


def slugify(text: str, max_words: int = 6) -> str:
    words = re.findall(r"[a-z0-9]+", text.lower())[:max_words]
    return "-".join(words) or "page"


def _digest(*parts: str) -> bytes:
    return hashlib.sha256("|".join(parts).encode("utf-8")).digest()


def make_page(title: str, sentences: list[str]) -> str:
    """A realistic page shell: nav/footer boilerplate around real paragraphs."""
    body = "".join(f"<p>{s}</p>\n" for s in sentences)
    return f"""<!DOCTYPE html>
<html><head><title>{title}</title><script>var analytics = true;</script></head>
<body>
<nav><a href="/">Home</a> <a href="/topics">Topics</a> <a href="/about">About us</a></nav>
<header><h1>{title}</h1></header>
<article>
{body}</article>
<aside><a href="/subscribe">Subscribe to our newsletter</a></aside>
<footer>Copyright notice. <a href="/terms">Terms</a> <a href="/privacy">Privacy</a></footer>
</body></html>
"""


def generic_page(url: str, query: str, stance: str) -> str:
    """Ten-sentence page whose one relevant sentence carries the stance marker."""
    claim_lower = query[0].lower() + query[1:] if query else query
    if stance == "support":
        relevant = f"Independent analysts have {SUPPORT_MARKER} that {claim_lower}."
    elif stance == "dispute":
        relevant = f"A recent audit {DISPUTE_MARKER} the suggestion that {claim_lower}."
    else:
        relevant = f"Commentators have debated whether {claim_lower} in various forums."
    picks = [_FILLER[_digest(url, str(i))[0] % len(_FILLER)] for i in range(9)]
    position = _digest(url, "pos")[0] % 8 + 1
    sentences = picks[:position] + [relevant] + picks[position:]
    return make_page(f"Notes on {slugify(query).replace('-', ' ')}", sentences)


def generic_stance(query: str, host: str) -> str:
    roll = _digest(query, host)[1] % 5
    if roll <= 1:
        return "support"
    if roll <= 3:
        return "dispute"
    return "none"


class ScriptedBackend:
    """Transport-protocol implementation driven by scenario tables."""

    def __init__(
        self,
        claims_table: dict[str, list[str]] | None = None,
        search_table: dict[str, list[dict[str, str]]] | None = None,
        pages: dict[str, str] | None = None,
        blocked_urls: set[str] | None = None,
        generic: bool = False,
    ):
        self.claims_table = claims_table or {}
        self.search_table = search_table or {}
        self.pages = pages or {}
        self.blocked_urls = blocked_urls or set()
        self.generic = generic

    # -- chat ---------------------------------------------------------------

    def chat(self, payload: dict) -> str:
        content = payload["messages"][-1]["content"]
        if "Break the following sentence into atomic claims" in content:
            return self._claims_response(content)
        if "Hostname:" in content and "Categories" in content:
            return self._category_response(content)
        if "Final Verdict" in content:
            return self._judgment_response(content)
        raise AssertionError(f"unscripted chat request: {content[:120]}")

    def _claims_response(self, content: str) -> str:
        target = _CLAIM_TARGET.findall(content)[-1].strip()
        claims = self.claims_table.get(target)
        if claims is None:
            if not self.generic:
                raise AssertionError(f"no scripted claims for {target!r}")
            claims = [target.rstrip(".!?")]
        return "\n".join(f"Claim_{i}: {claim}" for i, claim in enumerate(claims, start=1))

    def _category_response(self, content: str) -> str:
        host = _HOSTNAME.search(content).group(1).lower()
        if ".gov" in host:
            return "government_website"
        if "wikipedia" in host:
            return "wiki"
        if "blogspot" in host or ".blog" in host:
            return "blog"
        if "reddit" in host or "twitter" in host:
            return "social_media"
        if "webmd" in host or "medscape" in host or "ncbi" in host:
            return "scientific_medical_article"
        if "reuters" in host or "news" in host or "eurekalert" in host or "sciencedaily" in host:
            return "news"
        return "etc"

    def _judgment_response(self, content: str) -> str:
        evidence = content.rsplit("\nEvidence: ", 1)[1].split("\nGive your answer", 1)[0]
        lowered = evidence.lower()
        if "black tea" in lowered:
            return "The evidence discusses black tea varieties and does not address the claim."
        if DISPUTE_MARKER in lowered:
            return (
                "Rationale: The evidence describes an audit or review that disputes the "
                "claim rather than supporting it.\nFinal Verdict: no."
            )
        if SUPPORT_MARKER in lowered:
            return (
                "Rationale: The evidence explicitly confirms the statement made in the "
                "claim.\nFinal Verdict: yes."
            )
        if "anecdotal" in lowered or "reddit" in lowered or "forum thread" in lowered:
            return (
                "Rationale: The thread is anecdotal chatter unrelated to the claim.\n"
                "Final Verdict: irrelevant."
            )
        return "The evidence does not directly address the claim."

    # -- embeddings -----------------------------------------------------------

    def embed(self, payload: dict) -> list[list[float]]:
        vectors = []
        for text in payload["input"]:
            raw = hashlib.sha256(text.encode("utf-8")).digest()
            vectors.append([raw[i] - 127.5 for i in range(8)])
        return vectors

    # -- search ---------------------------------------------------------------

    def search(self, payload: dict) -> list[dict[str, str]]:
        query = payload["q"]
        if query in self.search_table:
            return list(self.search_table[query])
        if not self.generic:
            raise AssertionError(f"no scripted search results for {query!r}")
        start = _digest(query)[2] % len(_GENERIC_HOSTS)
        results = []
        for offset in range(3):
            host, _ = _GENERIC_HOSTS[(start + offset * 2) % len(_GENERIC_HOSTS)]
            url = f"https://{host}/{slugify(query)}-{offset + 1}"
            results.append(
                {
                    "url": url,
                    "title": f"{slugify(query).replace('-', ' ').title()} — reference {offset + 1}",
                    "snippet": f"Overview of {slugify(query).replace('-', ' ')}.",
                }
            )
        return results

    # -- fetch ------------------------------------------------------------------

    def fetch(self, payload: dict) -> str:
        url = payload["url"]
        if url in self.blocked_urls:
            raise FetchBlocked(f"{url} returned 403")
        if url in self.pages:
            return self.pages[url]
        if not self.generic:
            raise AssertionError(f"no scripted page for {url!r}")
        query = url.rsplit("/", 1)[-1].rsplit("-", 1)[0].replace("-", " ")
        host = url.split("/")[2]
        return generic_page(url, query, generic_stance_for_url(url, host))


def generic_stance_for_url(url: str, host: str) -> str:
    query_slug = url.rsplit("/", 1)[-1].rsplit("-", 1)[0]
    return generic_stance(query_slug, host)
