"""Exception types shared across the stack."""


class AnlessiniError(Exception):
    """Base class for all errors raised by this package."""


class CorruptSegmentError(AnlessiniError):
    """Segment bytes do not match their declared structure or checksums."""


class SegmentFormatError(AnlessiniError):
    """Input cannot be written as a valid segment (duplicate ids, empty corpus, oversize fields)."""


class DirectoryError(AnlessiniError):
    """A Directory backend failed to list, size, or open a file."""

    def __init__(self, message: str, *, file_name: str | None = None):
        super().__init__(message)
        self.file_name = file_name


class ObjectStoreError(AnlessiniError):
    """Object store request failed (transport or server-side)."""


class ObjectNotFound(ObjectStoreError):
    """The requested bucket/key does not exist."""


class InvalidRange(ObjectStoreError):
    """A ranged read fell outside the object's bounds."""


class InvalidKey(ObjectStoreError):
    """Bucket or key violates the naming rules."""


class DocStoreError(AnlessiniError):
    """Document store request failed (transport or server-side)."""


class DocumentNotFound(DocStoreError):
    """No document stored under the requested id."""


class ProvisioningError(AnlessiniError):
    """Cold start failed: the segment is missing, incomplete, or corrupt."""


class PoolOverloadError(AnlessiniError):
    """No instance became available before the queue timeout."""


class GenerationError(AnlessiniError):
    """A generation swap was rejected (incomplete or unknown generation)."""

    def __init__(self, message: str, *, missing: list[str] | None = None):
        super().__init__(message)
        self.missing = missing or []


class FanoutError(AnlessiniError):
    """A scatter-gather query failed on one of its partitions."""

    def __init__(self, message: str, *, partition: int | None = None):
        super().__init__(message)
        self.partition = partition


class IndexerError(AnlessiniError):
    """Corpus input is malformed or the batch build cannot proceed."""

