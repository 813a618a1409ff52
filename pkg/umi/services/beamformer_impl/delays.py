"""Focusing delays (µs) and directivity apodization between channels and voxels of one depth plane."""

import numpy as np

from umi.services.geometry_impl.illumination import BasisKind, IlluminationBasis
from umi.services.geometry_impl.probe import ProbeModel


def element_delays(probe: ProbeModel, points: np.ndarray, z: float, sound_speed: float) -> np.ndarray:
    """t(u, r) = |u − r| / c₀, shape (N_elem, N_ρ)."""
    dx = points[np.newaxis, :, 0] - probe.element_positions[:, 0, np.newaxis]
    dy = points[np.newaxis, :, 1] - probe.element_positions[:, 1, np.newaxis]
    return np.sqrt(dx**2 + dy**2 + z**2) / sound_speed


def element_apodization(probe: ProbeModel, points: np.ndarray, z: float) -> np.ndarray:
    """Binary cone cutoff: 1 where the voxel sits within θ_max of an active element's normal."""
    dx = points[np.newaxis, :, 0] - probe.element_positions[:, 0, np.newaxis]
    dy = points[np.newaxis, :, 1] - probe.element_positions[:, 1, np.newaxis]
    inside = np.hypot(dx, dy) <= z * np.tan(probe.directivity_limit) + 1e-9
    return (inside & probe.element_active[:, np.newaxis]).astype(np.float64)


def plane_wave_delays(basis: IlluminationBasis, points: np.ndarray, z: float, sound_speed: float) -> np.ndarray:
    """t(θ, r) = [x sin θ_x + y sin θ_y + z √(1 − sin²θ_x − sin²θ_y)] / c₀, shape (N_θ, N_ρ)."""
    assert basis.angles is not None
    sines = np.sin(basis.angles)
    axial = np.sqrt(np.clip(1.0 - np.sum(sines**2, axis=1), 0.0, None))
    return (sines @ points.T + z * axial[:, np.newaxis]) / sound_speed


def input_tables(basis: IlluminationBasis, probe: ProbeModel, points: np.ndarray, z: float, sound_speed: float) -> tuple[np.ndarray, np.ndarray]:
    """Delays and weights of the input channels for one depth plane."""
    if basis.kind == BasisKind.TRANSDUCER:
        return element_delays(probe, points, z, sound_speed), element_apodization(probe, points, z)
    assert basis.angles is not None
    return plane_wave_delays(basis, points, z, sound_speed), np.ones((basis.angles.shape[0], points.shape[0]))


def cylindrical_delay_plane_wave(theta: np.ndarray, s: np.ndarray, z: np.ndarray | float, sound_speed: float) -> np.ndarray:
    """t′(θ, s, z) = (s sin θ + z cos θ) / c₀, broadcast over θ and s."""
    return (s * np.sin(theta) + z * np.cos(theta)) / sound_speed


def cylindrical_delay_element(u: np.ndarray, s: np.ndarray, z: np.ndarray | float, sound_speed: float) -> np.ndarray:
    """t′(u, s, z) = √((s − u)² + z²) / c₀, broadcast over u and s."""
    return np.sqrt((s - u) ** 2 + z**2) / sound_speed
