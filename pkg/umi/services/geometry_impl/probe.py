from dataclasses import dataclass
from typing import Sequence

import numpy as np

from umi.services.exceptions import ValidationError

from .units import m_per_s_to_mm_per_us


# Elements reported dead on the reference probe datasheet; indices are row-major.
REFERENCE_DEAD_ELEMENTS = (37, 162, 411, 598, 777, 1003)

_MAX_DIRECTIVITY_SINE = float(np.sin(np.deg2rad(89.0)))


@dataclass(frozen=True, eq=False)
class ProbeModel:
    """Geometry and acoustics of a 2D matrix array.

    Attributes:
        element_positions: (N, 2) lateral coordinates u = (u_x, u_y) in mm, centered on the probe.
        element_active: (N,) boolean mask; dead elements are False.
        pitch: Element pitch δu in mm.
        aperture: (Δu_x, Δu_y) in mm, inactive rows included.
        center_frequency: f_c in MHz.
        bandwidth: (f_low, f_high) in MHz.
        directivity_limit: θ_max in radians.
        sound_speed: Reference c₀ in mm/µs.
    """

    element_positions: np.ndarray
    element_active: np.ndarray
    pitch: float
    aperture: tuple[float, float]
    center_frequency: float
    bandwidth: tuple[float, float]
    directivity_limit: float
    sound_speed: float

    def __post_init__(self) -> None:
        positions = np.array(self.element_positions, dtype=np.float64)
        active = np.array(self.element_active, dtype=bool)

        if positions.ndim != 2 or positions.shape[1] != 2:
            raise ValidationError("Element positions must be an (N, 2) array.", {"shape": positions.shape})
        if active.shape != (positions.shape[0],):
            raise ValidationError("Element mask must have one entry per element.", {"elements": positions.shape[0], "mask": active.shape})
        if not active.any():
            raise ValidationError("Probe has no active element.")
        if self.pitch <= 0:
            raise ValidationError("Pitch must be positive.", {"pitch": self.pitch})
        if min(self.aperture) <= 0:
            raise ValidationError("Aperture must be positive on both axes.", {"aperture": self.aperture})
        if self.center_frequency <= 0 or self.sound_speed <= 0:
            raise ValidationError("Center frequency and sound speed must be positive.")
        low, high = self.bandwidth
        if not 0 <= low < high:
            raise ValidationError("Bandwidth must be an increasing frequency interval.", {"bandwidth": self.bandwidth})
        if not 0 < self.directivity_limit < np.pi / 2:
            raise ValidationError("Directivity limit must lie in (0, pi/2).", {"directivity_limit": self.directivity_limit})

        steps = (positions - positions.min(axis=0)) / self.pitch
        if not np.allclose(steps, np.round(steps), atol=1e-6):
            raise ValidationError("Element positions are not on a regular grid of the given pitch.")

        positions.setflags(write=False)
        active.setflags(write=False)
        object.__setattr__(self, "element_positions", positions)
        object.__setattr__(self, "element_active", active)
        object.__setattr__(self, "aperture", (float(self.aperture[0]), float(self.aperture[1])))
        object.__setattr__(self, "bandwidth", (float(low), float(high)))

    @property
    def n_elements(self) -> int:
        return int(self.element_positions.shape[0])

    @property
    def n_active(self) -> int:
        return int(self.element_active.sum())

    @property
    def wavelength(self) -> float:
        """Central wavelength λ_c in mm."""
        return self.sound_speed / self.center_frequency

    @property
    def wavenumber(self) -> float:
        """Central wavenumber k_c in rad/mm."""
        return 2.0 * np.pi / self.wavelength

    @property
    def bandwidth_width(self) -> float:
        return self.bandwidth[1] - self.bandwidth[0]

    @property
    def fractional_bandwidth(self) -> float:
        return self.bandwidth_width / self.center_frequency

    @property
    def center_index(self) -> int:
        """Index of the active element closest to the probe center."""
        distances = np.linalg.norm(self.element_positions, axis=1)
        distances = np.where(self.element_active, distances, np.inf)
        return int(np.argmin(distances))

    def with_sound_speed(self, sound_speed: float) -> "ProbeModel":
        """Return a copy with another reference sound speed; θ_max is kept."""
        return ProbeModel(
            element_positions=self.element_positions,
            element_active=self.element_active,
            pitch=self.pitch,
            aperture=self.aperture,
            center_frequency=self.center_frequency,
            bandwidth=self.bandwidth,
            directivity_limit=self.directivity_limit,
            sound_speed=sound_speed,
        )


def default_directivity(wavelength: float, pitch: float) -> float:
    """θ_max = arcsin(λ_c / (2 δu)), kept below 89 degrees for dense arrays."""
    return float(np.arcsin(min(wavelength / (2.0 * pitch), _MAX_DIRECTIVITY_SINE)))


def matrix_probe(
    n_x: int,
    n_y: int,
    pitch: float = 0.5,
    center_frequency: float = 3.0,
    bandwidth: tuple[float, float] = (1.8, 4.2),
    sound_speed: float = 1.54,
    rows_per_block: int | None = None,
    gap_rows: int = 0,
    dead_elements: Sequence[int] = (),
    directivity_limit: float | None = None,
) -> ProbeModel:
    """Build a rectangular matrix array.

    Args:
        n_x: Elements per row.
        n_y: Active rows.
        pitch: Element pitch in mm.
        center_frequency: f_c in MHz.
        bandwidth: (low, high) in MHz.
        sound_speed: c₀ in mm/µs.
        rows_per_block: When set, rows are grouped in blocks of this size.
        gap_rows: Inactive rows inserted between consecutive blocks.
        dead_elements: Row-major indices of dead elements.
        directivity_limit: θ_max in radians; defaults to arcsin(λ_c / (2 δu)).

    Returns:
        A validated ProbeModel centered on (0, 0).
    """
    if n_x <= 0 or n_y <= 0:
        raise ValidationError("Probe needs at least one row and one column.", {"n_x": n_x, "n_y": n_y})

    row_slots = np.arange(n_y)
    if rows_per_block:
        row_slots = row_slots + (row_slots // rows_per_block) * gap_rows
    total_rows = int(row_slots[-1]) + 1

    xs = (np.arange(n_x) - (n_x - 1) / 2.0) * pitch
    ys = (row_slots - (total_rows - 1) / 2.0) * pitch
    grid_y, grid_x = np.meshgrid(ys, xs, indexing="ij")
    positions = np.column_stack([grid_x.ravel(), grid_y.ravel()])

    active = np.ones(n_x * n_y, dtype=bool)
    dead = [index for index in dead_elements if index < active.size]
    active[dead] = False

    wavelength = sound_speed / center_frequency
    theta_max = directivity_limit if directivity_limit is not None else default_directivity(wavelength, pitch)

    return ProbeModel(
        element_positions=positions,
        element_active=active,
        pitch=pitch,
        aperture=(n_x * pitch, total_rows * pitch),
        center_frequency=center_frequency,
        bandwidth=bandwidth,
        directivity_limit=theta_max,
        sound_speed=sound_speed,
    )


def reference_matrix_probe(sound_speed_m_s: float = 1540.0) -> ProbeModel:
    """The 32×32 datasheet probe: 4 blocks of 256 elements split by inactive rows, 6 dead elements."""
    return matrix_probe(
        n_x=32,
        n_y=32,
        pitch=0.5,
        center_frequency=3.0,
        bandwidth=(1.8, 4.2),
        sound_speed=m_per_s_to_mm_per_us(sound_speed_m_s),
        rows_per_block=8,
        gap_rows=1,
        dead_elements=REFERENCE_DEAD_ELEMENTS,
    )


def desk_probe(n: int = 16, pitch: float = 0.5, sound_speed_m_s: float = 1540.0) -> ProbeModel:
    """Square probe without gaps or dead elements, sized for desk-scale runs."""
    return matrix_probe(n_x=n, n_y=n, pitch=pitch, sound_speed=m_per_s_to_mm_per_us(sound_speed_m_s))
