"""Exception hierarchy shared across the pipeline."""


class FactlensError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FactlensError):
    """An argument violated a documented precondition."""


class EmptyInput(DomainError):
    """Input text was empty or whitespace-only."""


class UnknownEvidenceId(DomainError):
    """A selection mask referenced an evidence id not present in the report."""


class MalformedClaimResponse(FactlensError):
    """A claim-generation response contained no parsable claim lines."""


class EmptyDocument(FactlensError):
    """A fetched page yielded no extractable text."""


class ProviderError(FactlensError):
    """Base class for provider-gateway failures."""


class TransportError(ProviderError):
    """Network-level failure talking to a provider endpoint."""


class RateLimited(TransportError):
    """Provider returned a rate-limit response after retries."""


class FetchBlocked(ProviderError):
    """Page fetch refused by the remote host (4xx, robots, security block)."""


class FetchTimeout(ProviderError):
    """Page fetch exceeded the configured timeout."""


class ReplayMiss(ProviderError):
    """Replay mode had no recorded response for a request key."""

    def __init__(self, kind: str, key: str):
        super().__init__(f"no recorded {kind} response for key {key}")
        self.kind = kind
        self.key = key


class ProviderOutage(FactlensError):
    """Every provider call in a stage failed; the job cannot proceed."""


class IllegalTransition(FactlensError):
    """A job-state event was not legal for the job's current state."""


class ReportIntegrityError(FactlensError):
    """A credibility report violated referential integrity."""
