import logging
from dataclasses import dataclass, field

import numpy as np

from umi.services.exceptions import ValidationError
from umi.services.geometry_impl.probe import ProbeModel
from umi.services.geometry_impl.resolution import axial_resolution, diffraction_limit

logger = logging.getLogger(__name__)

DEFAULT_SPECKLE_DENSITY = 4.0


@dataclass(frozen=True)
class PointScatterer:
    position: tuple[float, float, float]
    reflectivity: complex = 1.0 + 0.0j


@dataclass(frozen=True)
class SpeckleRegion:
    """Box of random scatterers; ``density`` is the mean count per resolution cell."""

    box_min: tuple[float, float, float]
    box_max: tuple[float, float, float]
    density: float = DEFAULT_SPECKLE_DENSITY
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.density <= 0:
            raise ValidationError("Speckle density must be positive.", {"density": self.density})
        if any(high <= low for low, high in zip(self.box_min, self.box_max)):
            raise ValidationError("Speckle box must have positive extent on every axis.", {"box_min": self.box_min, "box_max": self.box_max})

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.box_max, self.box_min)))

    @property
    def center_depth(self) -> float:
        return (self.box_min[2] + self.box_max[2]) / 2.0

    def expected_count(self, probe: ProbeModel) -> int:
        cell = diffraction_limit(probe, self.center_depth) ** 2 * axial_resolution(probe)
        return max(int(round(self.density * self.volume / cell)), 1)


@dataclass(frozen=True)
class MediumDescription:
    """Scattering medium: isolated points plus speckle boxes, sound speed c₀ in mm/µs."""

    scatterers: tuple[PointScatterer, ...] = ()
    speckle_regions: tuple[SpeckleRegion, ...] = ()
    sound_speed: float = 1.54
    name: str = field(default="medium", compare=False)

    def __post_init__(self) -> None:
        if self.sound_speed <= 0:
            raise ValidationError("Sound speed must be positive.", {"sound_speed": self.sound_speed})

    @property
    def is_empty(self) -> bool:
        return not self.scatterers and not self.speckle_regions

    def merged(self, other: "MediumDescription") -> "MediumDescription":
        return MediumDescription(
            scatterers=self.scatterers + other.scatterers,
            speckle_regions=self.speckle_regions + other.speckle_regions,
            sound_speed=self.sound_speed,
            name=f"{self.name}+{other.name}",
        )

    def materialize(self, probe: ProbeModel, rng: np.random.Generator | None) -> tuple[np.ndarray, np.ndarray]:
        """Draw the scatterer cloud.

        Returns:
            positions (M, 3) in mm and complex reflectivities (M,). Speckle
            amplitudes are unit-variance circular complex Gaussian scaled by
            the region amplitude.
        """
        if self.is_empty:
            raise ValidationError("Medium has no scatterer.")
        positions = [np.array([s.position for s in self.scatterers], dtype=np.float64).reshape(-1, 3)]
        reflectivities = [np.array([s.reflectivity for s in self.scatterers], dtype=np.complex128)]

        if self.speckle_regions and rng is None:
            raise ValidationError("Speckle regions need a random generator.")
        for region in self.speckle_regions:
            assert rng is not None
            count = region.expected_count(probe)
            positions.append(rng.uniform(region.box_min, region.box_max, size=(count, 3)))
            gaussian = rng.standard_normal((count, 2))
            reflectivities.append(region.amplitude * (gaussian[:, 0] + 1j * gaussian[:, 1]) / np.sqrt(2.0))
            logger.info(f"Speckle region {region.box_min}..{region.box_max}: {count} scatterers.")

        return np.concatenate(positions), np.concatenate(reflectivities)
