"""Thin phase-screen aberrators and their generators."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.ndimage import gaussian_filter

from umi.services.exceptions import ValidationError
from umi.services.geometry_impl.probe import ProbeModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PhaseScreen:
    """Transmittance a(p)·exp(iφ(p)) sampled on a regular lateral grid at depth z_s (mm).

    Points outside the sampled area take the value of the nearest edge sample.
    """

    depth: float
    x: np.ndarray
    y: np.ndarray
    phase: np.ndarray
    amplitude: np.ndarray | None = None

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=np.float64)
        y = np.array(self.y, dtype=np.float64)
        phase = np.array(self.phase, dtype=np.float64)
        if self.depth < 0:
            raise ValidationError("Screen depth must be >= 0.", {"depth": self.depth})
        if x.ndim != 1 or y.ndim != 1 or x.size < 2 or y.size < 2:
            raise ValidationError("Screen axes need at least two samples each.")
        if phase.shape != (y.size, x.size):
            raise ValidationError("Screen phase must be sampled as (ny, nx).", {"shape": phase.shape, "expected": (y.size, x.size)})
        if not np.all(np.isfinite(phase)):
            raise ValidationError("Screen phase must be finite and real.")
        if self.amplitude is not None:
            amplitude = np.array(self.amplitude, dtype=np.float64)
            if amplitude.shape != phase.shape or amplitude.min() < 0 or amplitude.max() > 1:
                raise ValidationError("Screen amplitude must match the phase grid and lie in [0, 1].")
            amplitude.setflags(write=False)
            object.__setattr__(self, "amplitude", amplitude)
        for name, values in (("x", x), ("y", y), ("phase", phase)):
            values.setflags(write=False)
            object.__setattr__(self, name, values)

    def _sample(self, values: np.ndarray, points: np.ndarray) -> np.ndarray:
        interpolator = RegularGridInterpolator((self.y, self.x), values, method="linear")
        clipped = np.column_stack([np.clip(points[:, 1], self.y[0], self.y[-1]), np.clip(points[:, 0], self.x[0], self.x[-1])])
        return interpolator(clipped)

    def transmittance(self, points: np.ndarray) -> np.ndarray:
        """Complex transmittance at lateral points (M, 2) given as (x, y)."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        values = np.exp(1j * self._sample(self.phase, points))
        if self.amplitude is not None:
            values = values * self._sample(self.amplitude, points)
        return values

    def law(self, probe: ProbeModel) -> np.ndarray:
        """Ground-truth law T(u) seen at the element positions, zero on dead elements."""
        return np.where(probe.element_active, self.transmittance(probe.element_positions), 0.0)

    def rms_phase(self) -> float:
        return float(np.std(self.phase))


def _screen_axes(probe: ProbeModel, depth: float, margin: float | None) -> tuple[np.ndarray, np.ndarray]:
    if margin is None:
        margin = depth * np.tan(probe.directivity_limit) + 2.0 * probe.pitch
    half_x = probe.aperture[0] / 2.0 + margin
    half_y = probe.aperture[1] / 2.0 + margin
    count_x = int(np.ceil(half_x / probe.pitch))
    count_y = int(np.ceil(half_y / probe.pitch))
    return probe.pitch * np.arange(-count_x, count_x + 1), probe.pitch * np.arange(-count_y, count_y + 1)


def _correlated_field(shape: tuple[int, int], rms: float, correlation_length: float, rng: np.random.Generator) -> np.ndarray:
    field = rng.standard_normal(shape)
    if correlation_length > 0:
        field = gaussian_filter(field, sigma=correlation_length, mode="wrap")
    field = field - field.mean()
    spread = field.std()
    return field * (rms / spread) if spread > 0 else field


def flat_screen(probe: ProbeModel, depth: float = 0.0) -> PhaseScreen:
    x, y = _screen_axes(probe, depth, None)
    return PhaseScreen(depth=depth, x=x, y=y, phase=np.zeros((y.size, x.size)))


def random_screen(
    probe: ProbeModel,
    rms: float,
    correlation_length: float,
    rng: np.random.Generator,
    depth: float = 0.0,
    margin: float | None = None,
) -> PhaseScreen:
    """Gaussian-correlated phase screen.

    Args:
        rms: Phase standard deviation in radians.
        correlation_length: Gaussian kernel width in elements (0 gives white phase).
        depth: Screen plane z_s in mm.
        margin: Extra half-width beyond the aperture in mm; defaults to the
            lateral reach of the directivity cone at the screen depth.
    """
    if rms < 0 or correlation_length < 0:
        raise ValidationError("Screen RMS and correlation length must be >= 0.", {"rms": rms, "correlation_length": correlation_length})
    x, y = _screen_axes(probe, depth, margin)
    phase = _correlated_field((y.size, x.size), rms, correlation_length, rng)
    logger.info(f"Random screen at z={depth} mm: rms {rms:.2f} rad, correlation {correlation_length} elements.")
    return PhaseScreen(depth=depth, x=x, y=y, phase=phase)


def split_screen(
    probe: ProbeModel,
    rms: tuple[float, float],
    correlation_length: float,
    rng: np.random.Generator,
    step: float = 0.0,
    depth: float = 0.0,
    boundary: float = 0.0,
) -> PhaseScreen:
    """Two-patch screen split at x = ``boundary``.

    Each half carries an independent field with its own RMS; the right half is
    offset by ``step`` radians, mimicking a sound-speed jump between two tissues.
    """
    if min(rms) < 0 or correlation_length < 0:
        raise ValidationError("Screen RMS and correlation length must be >= 0.", {"rms": rms})
    x, y = _screen_axes(probe, depth, None)
    left = _correlated_field((y.size, x.size), rms[0], correlation_length, rng)
    right = _correlated_field((y.size, x.size), rms[1], correlation_length, rng) + step
    phase = np.where(x[np.newaxis, :] < boundary, left, right)
    logger.info(f"Split screen at x={boundary} mm: rms {rms}, step {step:.2f} rad.")
    return PhaseScreen(depth=depth, x=x, y=y, phase=phase)
