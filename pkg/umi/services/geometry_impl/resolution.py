"""Diffraction-limited resolution cells of a matrix probe."""

import numpy as np

from umi.services.exceptions import ValidationError

from .probe import ProbeModel


def _depths(z: float | np.ndarray) -> np.ndarray:
    depths = np.asarray(z, dtype=np.float64)
    if np.any(depths <= 0):
        raise ValidationError("Depth must be positive.", {"z": depths.tolist()})
    return depths


def _limit(wavelength: float, aperture: float, depths: np.ndarray) -> np.ndarray:
    return wavelength / (2.0 * np.sin(np.arctan(aperture / (2.0 * depths))))


def diffraction_limit(probe: ProbeModel, z: float | np.ndarray) -> float | np.ndarray:
    """Transverse resolution δρ₀(z) = λ_c / (2 sin(arctan(Δu / 2z))) in mm.

    Δu is the smaller aperture side, so δρ₀ is the worst-axis resolution.
    Accepts a scalar depth or an array of depths.
    """
    depths = _depths(z)
    result = _limit(probe.wavelength, min(probe.aperture), depths)
    return float(result) if result.ndim == 0 else result


def diffraction_limit_per_axis(probe: ProbeModel, z: float) -> tuple[float, float]:
    depths = _depths(z)
    return (float(_limit(probe.wavelength, probe.aperture[0], depths)), float(_limit(probe.wavelength, probe.aperture[1], depths)))


def axial_resolution(probe: ProbeModel) -> float:
    """Pulse-echo axial cell δz₀ = c₀ / (2 B) in mm."""
    return probe.sound_speed / (2.0 * probe.bandwidth_width)
