import logging

import numpy as np

from umi.services.acquisition_impl.raw import ReflectionMatrixRaw
from umi.services.geometry_impl.grid import VoxelGrid

from .config import BeamformConfig
from .delays import element_apodization, element_delays, input_tables
from .focused import ConfocalVolume, FocusedRMatrix
from .kernels import focus_band

logger = logging.getLogger(__name__)


def aliasing_limit(raw: ReflectionMatrixRaw) -> float:
    """Offset beyond which plane-wave undersampling creates replica lobes: λ_c / (2 sin δθ)."""
    if not raw.is_plane_wave:
        return float("inf")
    assert raw.basis.sine_step is not None
    return raw.probe.wavelength / raw.basis.sine_step


class Beamformer:
    """Delay-and-sum projection of raw matrices onto the focused basis."""

    def __init__(self, config: BeamformConfig | None = None) -> None:
        self.config = config or BeamformConfig()

    def _sound_speed(self, raw: ReflectionMatrixRaw) -> float:
        return self.config.sound_speed or raw.sound_speed

    def _tables(self, raw: ReflectionMatrixRaw, points: np.ndarray, z: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        sound_speed = self._sound_speed(raw)
        delay_in, weight_in = input_tables(raw.basis, raw.probe, points, z, sound_speed)
        delay_out = element_delays(raw.probe, points, z, sound_speed)
        if self.config.apodization == "cone":
            weight_out = element_apodization(raw.probe, points, z)
        else:
            weight_out = np.broadcast_to(raw.probe.element_active[:, np.newaxis], delay_out.shape).astype(np.float64)
            weight_in = np.where(weight_in > 0, 1.0, weight_in) if raw.is_plane_wave else weight_out
        return delay_in, delay_out, weight_in, weight_out

    def _warn_coverage(self, weight_out: np.ndarray, z: float) -> None:
        uncovered = int(np.count_nonzero(~weight_out.any(axis=0)))
        if uncovered:
            logger.warning(f"{uncovered} voxels at z={z:.2f} mm have no active element in their directivity cone; their coefficients are 0.")

    def beamform(self, raw: ReflectionMatrixRaw, grid: VoxelGrid) -> FocusedRMatrix:
        """Focused matrix R(ρ_in, ρ_out, z) for every offset up to Δρ_max."""
        max_offset = self.config.max_offset
        limit = aliasing_limit(raw)
        if max_offset > limit:
            logger.warning(f"Maximum offset {max_offset:.2f} mm exceeds the plane-wave aliasing limit {limit:.2f} mm; replica lobes will appear.")

        template = FocusedRMatrix.zeros(grid, max_offset, raw.probe, input_basis=raw.basis.kind, apodization=self.config.apodization, sound_speed=self._sound_speed(raw))
        neighbours = np.ascontiguousarray(template.neighbour_table)
        points = grid.lateral_points()
        blocks = np.zeros((grid.nz, grid.n_lateral, template.n_offsets), dtype=np.complex64)

        logger.info(f"Beamforming {raw.n_inputs}x{raw.probe.n_elements} channels onto {grid.shape} voxels, {template.n_offsets} offsets.")
        for iz, z in enumerate(grid.z):
            delay_in, delay_out, weight_in, weight_out = self._tables(raw, points, float(z))
            self._warn_coverage(weight_out, float(z))
            if raw.n_samples == 0:
                continue
            blocks[iz] = focus_band(
                raw.signals,
                delay_in,
                delay_out,
                np.ascontiguousarray(weight_in),
                np.ascontiguousarray(weight_out),
                neighbours,
                raw.time_origin,
                raw.sampling_frequency,
                raw.demodulation_frequency,
            )
        return template.with_blocks(blocks)

    def beamform_confocal(self, raw: ReflectionMatrixRaw, grid: VoxelGrid) -> ConfocalVolume:
        """Single-pass compounded image: input and output focused on the same voxel."""
        points = grid.lateral_points()
        diagonal = np.arange(grid.n_lateral, dtype=np.int64)[:, np.newaxis]
        values = np.zeros((grid.nz, grid.n_lateral), dtype=np.complex64)
        for iz, z in enumerate(grid.z):
            delay_in, delay_out, weight_in, weight_out = self._tables(raw, points, float(z))
            if raw.n_samples == 0:
                continue
            values[iz] = focus_band(
                raw.signals,
                delay_in,
                delay_out,
                np.ascontiguousarray(weight_in),
                np.ascontiguousarray(weight_out),
                diagonal,
                raw.time_origin,
                raw.sampling_frequency,
                raw.demodulation_frequency,
            )[:, 0]
        return ConfocalVolume(grid=grid, intensity=np.abs(values.reshape(grid.shape)) ** 2)


def beamform(raw: ReflectionMatrixRaw, grid: VoxelGrid, max_offset: float, apodization: str = "cone") -> FocusedRMatrix:
    return Beamformer(BeamformConfig(max_offset=max_offset, apodization=apodization)).beamform(raw, grid)


def beamform_confocal(raw: ReflectionMatrixRaw, grid: VoxelGrid, apodization: str = "cone") -> ConfocalVolume:
    return Beamformer(BeamformConfig(max_offset=0.0, apodization=apodization)).beamform_confocal(raw, grid)
