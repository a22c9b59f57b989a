from .client import ObjectStoreClient, RemoteDirectory
from .server import make_app
from .storage import BlobStore, ObjectMeta, validate_bucket, validate_key

__all__ = [
    "make_app",
    "validate_bucket",
    "validate_key",
    "BlobStore",
    "ObjectMeta",
    "ObjectStoreClient",
    "RemoteDirectory",
]
