"""Error taxonomy for the fine-tune and serving side."""


class ServiceError(Exception):
    """Base class for everything this package raises on purpose."""


class BadPairsFile(ServiceError):
    """Pairs file missing, empty, or containing a line off the pair schema."""


class ModelLoadFailure(ServiceError):
    """Base model identifier did not resolve to a loadable model."""
