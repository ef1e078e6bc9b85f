"""Exception hierarchy shared across the pipeline."""


class ReviewGuardError(Exception):
    """Base class for all domain errors; CLI maps these to exit code 1."""


class StoreError(ReviewGuardError):
    """Corrupt or inconsistent local store."""


class IngestError(ReviewGuardError):
    """Acquisition failed; carries a resume token when one is available."""

    def __init__(self, message, resume_token=None):
        super().__init__(message)
        self.resume_token = resume_token


class InsufficientReviewsError(ReviewGuardError):
    """Fewer than three scored reviews; consensus is undefined."""


class AnnotationParseError(ReviewGuardError):
    """Model output could not be turned into valid annotation records."""

    def __init__(self, message, raw=None):
        super().__init__(message)
        self.raw = raw


class BackendError(ReviewGuardError):
    """External backend call failed after exhausting the retry policy."""


class AuthError(BackendError):
    """Missing or rejected credentials; never retried."""


class EmptyTextError(ReviewGuardError):
    """Text-level operation received empty or whitespace-only input."""


class ZeroVarianceError(ReviewGuardError):
    """Correlation requested against a constant vector."""


class DegenerateTableError(ReviewGuardError):
    """Contingency table has a zero marginal."""


class CoverageError(ReviewGuardError):
    """Predictions do not cover the gold set exactly."""

    def __init__(self, message, missing=(), extra=()):
        super().__init__(message)
        self.missing = list(missing)
        self.extra = list(extra)


class StratificationError(ReviewGuardError):
    """A class is absent from one of the requested splits."""


class ConfigError(ReviewGuardError):
    """Invalid run or backend configuration."""
