"""Imaging services for the umi project.

One package per pipeline module; shared exceptions are re-exported here.
"""

from umi.services.exceptions import (
    AcquisitionError,
    ArtifactError,
    BadMagicError,
    ConfigurationError,
    ContractError,
    DimensionOverflowError,
    DomainError,
    PipelineConfigurationError,
    ServiceError,
    StageError,
    TruncatedArtifactError,
    ValidationError,
    WindowError,
)

__all__ = [
    # Base exceptions
    "ServiceError",
    "ConfigurationError",
    "DomainError",
    "ArtifactError",
    "StageError",
    # Configuration
    "PipelineConfigurationError",
    # Domain
    "ValidationError",
    "AcquisitionError",
    "ContractError",
    "WindowError",
    # Artifacts
    "BadMagicError",
    "TruncatedArtifactError",
    "DimensionOverflowError",
]
