from .client import DocStoreClient
from .server import make_app
from .storage import DocLog

__all__ = ["make_app", "DocLog", "DocStoreClient"]
