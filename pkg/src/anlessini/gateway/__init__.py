from .app import make_app
from .models import SearchHit, SearchResponse, StatusResponse, SwapRequest, SwapResponse
from .service import SearchService, build_local_service

__all__ = [
    "build_local_service",
    "make_app",
    "SearchHit",
    "SearchResponse",
    "SearchService",
    "StatusResponse",
    "SwapRequest",
    "SwapResponse",
]
