"""Exception types shared across the package."""


class BoltzvoteError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(BoltzvoteError, ValueError):
    """Inputs whose shapes or lengths do not agree."""


class EnumerationLimitExceeded(BoltzvoteError, ValueError):
    """Exact enumeration requested for a model too large to enumerate."""


class EmptyBatch(BoltzvoteError, ValueError):
    """A sample batch with zero reads where at least one is required."""


class EmbeddingCapacityError(BoltzvoteError, ValueError):
    """The requested clique does not fit on the given Chimera graph."""


class EmbeddingError(BoltzvoteError, ValueError):
    """An embedding violates disjointness, connectivity, or coverage."""


class DatasetError(BoltzvoteError, ValueError):
    """A dataset file is malformed; the message carries file and line."""
