from .gateway import GatewayMode, ProviderGateway, SearchResult
from .replay import ReplayStore, request_key
from .settings import ProviderSettings
from .transport import HttpTransport, Transport

__all__ = [
    "GatewayMode",
    "HttpTransport",
    "ProviderGateway",
    "ProviderSettings",
    "ReplayStore",
    "SearchResult",
    "Transport",
    "request_key",
]
