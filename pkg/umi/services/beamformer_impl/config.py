from dataclasses import dataclass, field

from django.conf import settings

from umi.services.exceptions import ConfigurationError

APODIZATIONS = ("cone", "none")


@dataclass(frozen=True)
class BeamformConfig:
    """Focusing parameters; defaults come from settings."""

    max_offset: float = field(default_factory=lambda: float(getattr(settings, "UMI_MAX_OFFSET_MM", 10.0)))
    voxel_pitch: float = field(default_factory=lambda: float(getattr(settings, "UMI_VOXEL_PITCH_MM", 0.5)))
    apodization: str = "cone"
    sound_speed: float | None = None

    def __post_init__(self) -> None:
        if self.max_offset < 0:
            raise ConfigurationError("Maximum offset cannot be negative.", {"max_offset": self.max_offset})
        if self.voxel_pitch <= 0:
            raise ConfigurationError("Voxel pitch must be positive.", {"voxel_pitch": self.voxel_pitch})
        if self.apodization not in APODIZATIONS:
            raise ConfigurationError(f"Unknown apodization '{self.apodization}'.", {"choices": APODIZATIONS})
        if self.sound_speed is not None and self.sound_speed <= 0:
            raise ConfigurationError("Sound speed must be positive.", {"sound_speed": self.sound_speed})
