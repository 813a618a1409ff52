"""Standardized exception hierarchy for umi services.

Every failure raised by the imaging services derives from ``ServiceError`` so
that commands and tasks can report it uniformly.

Exception Hierarchy:
    ServiceError (base)
        ConfigurationError
            PipelineConfigurationError
        DomainError
            ValidationError
                AcquisitionError
            ContractError
            WindowError
        ArtifactError
            BadMagicError
            TruncatedArtifactError
            DimensionOverflowError
        StageError

Usage:
    from umi.services.exceptions import ArtifactError, ServiceError

    try:
        raw = read_raw(path)
    except ArtifactError:
        # Corrupted or truncated file
        pass
    except ServiceError:
        # Catch-all for any service-related error
        pass
"""

from typing import Any


class ServiceError(Exception):
    """Base exception for all service-related errors.

    Attributes:
        message: Human-readable error description.
        details: Optional dictionary with additional error context.
    """

    def __init__(self, message: str, details: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        """Return string representation of the error."""
        if self.details:
            return f"{self.message} (details: {self.details})"
        return self.message


class ConfigurationError(ServiceError):
    """Raised when settings or a run configuration are missing or invalid."""

    pass


class PipelineConfigurationError(ConfigurationError):
    """Raised when a pipeline configuration file fails validation."""

    pass


class DomainError(ServiceError):
    """Base exception for errors raised by the imaging algorithms."""

    pass


class ValidationError(DomainError):
    """Raised when an operation's precondition is violated (e.g. z <= 0)."""

    pass


class AcquisitionError(ValidationError):
    """Raised when the simulator rejects its input (e.g. a scatterer behind the probe)."""

    pass


class ContractError(DomainError):
    """Raised when two modules disagree on shared data.

    Examples are a phase law built on another correction basis than the
    focused matrix, or an offset range too short for the background annulus.
    """

    pass


class WindowError(DomainError):
    """Raised when a spatial window is empty or covers too few resolution cells."""

    pass


class ArtifactError(ServiceError):
    """Base exception for binary artifact (UMR1/UMF1/UMT1/UMS1) errors."""

    def __init__(self, message: str, path: str | None = None, details: dict[str, Any] | None = None) -> None:
        super().__init__(message, details)
        self.path = path


class BadMagicError(ArtifactError):
    """Raised when a file does not start with the expected magic bytes."""

    def __init__(self, path: str | None = None, expected: bytes = b"", found: bytes = b"") -> None:
        super().__init__("bad magic", path=path, details={"expected": expected, "found": found})


class TruncatedArtifactError(ArtifactError):
    """Raised when a file ends before its header or payload is complete."""

    pass


class DimensionOverflowError(ArtifactError):
    """Raised when header dimensions exceed what the file (or memory) can hold."""

    pass


class StageError(ServiceError):
    """Raised when a pipeline stage fails.

    Attributes:
        stage: Name of the failing stage.
        manifest: Paths of the artifacts written before the failure.
    """

    def __init__(self, stage: str, message: str, manifest: list[str] | None = None, details: dict[str, Any] | None = None) -> None:
        super().__init__(f"Stage '{stage}' failed: {message}", details)
        self.stage = stage
        self.manifest = manifest or []
