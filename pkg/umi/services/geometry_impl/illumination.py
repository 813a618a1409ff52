import enum
import logging
from dataclasses import dataclass

import numpy as np

from umi.services.exceptions import ValidationError

from .probe import ProbeModel

logger = logging.getLogger(__name__)

# Slack on floor() so that exact ratios (e.g. 17.5 / 0.5) are not lost to rounding.
_FLOOR_SLACK = 1e-9


class BasisKind(enum.IntEnum):
    TRANSDUCER = 0
    PLANE_WAVE = 1


@dataclass(frozen=True, eq=False)
class IlluminationBasis:
    """Input basis of a reflection matrix.

    Plane waves are sampled uniformly in sin θ with step ``sine_step`` on both
    axes; ``angles`` holds (θ_x, θ_y) in radians, θ_x varying fastest.
    """

    kind: BasisKind
    angles: np.ndarray | None = None
    angular_pitch: float | None = None
    sine_step: float | None = None

    def __post_init__(self) -> None:
        if self.kind == BasisKind.TRANSDUCER:
            return
        if self.angles is None or self.angular_pitch is None or self.sine_step is None:
            raise ValidationError("Plane-wave basis needs angles, an angular pitch and a sine step.")
        angles = np.array(self.angles, dtype=np.float64).reshape(-1, 2)
        if angles.shape[0] == 0:
            raise ValidationError("Plane-wave basis needs at least one angle.")
        if self.angular_pitch <= 0 or self.sine_step <= 0:
            raise ValidationError("Angular pitch must be positive.", {"angular_pitch": self.angular_pitch})
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)

    @classmethod
    def transducer(cls) -> "IlluminationBasis":
        return cls(kind=BasisKind.TRANSDUCER)

    def size(self, probe: ProbeModel) -> int:
        """Number of input channels N_in."""
        if self.kind == BasisKind.TRANSDUCER:
            return probe.n_elements
        assert self.angles is not None
        return int(self.angles.shape[0])

    def validate_for(self, probe: ProbeModel) -> None:
        """Check |θ_x|, |θ_y| <= θ_max."""
        if self.kind == BasisKind.TRANSDUCER:
            return
        assert self.angles is not None
        if np.abs(self.angles).max() > probe.directivity_limit + 1e-12:
            raise ValidationError("Plane-wave angles exceed the probe directivity.", {"theta_max": probe.directivity_limit})

    def sine_indices(self) -> np.ndarray:
        """Integer (i_x, i_y) of each angle on the sine lattice."""
        assert self.angles is not None and self.sine_step is not None
        return np.rint(np.sin(self.angles) / self.sine_step).astype(np.int64)

    def downsampled(self, factor: int) -> "IlluminationBasis":
        """Keep every ``factor``-th angle per axis, centered on normal incidence."""
        if self.kind == BasisKind.TRANSDUCER:
            raise ValidationError("Only plane-wave bases can be downsampled.")
        if factor < 1:
            raise ValidationError("Downsampling factor must be >= 1.", {"factor": factor})
        assert self.angles is not None and self.sine_step is not None
        indices = self.sine_indices()
        keep = np.all(indices % factor == 0, axis=1)
        step = self.sine_step * factor
        pitch = float(np.arcsin(min(step / 2.0, 1.0)))
        logger.info(f"Downsampled plane-wave basis by {factor}: {int(keep.sum())} of {indices.shape[0]} angles kept.")
        return IlluminationBasis(kind=BasisKind.PLANE_WAVE, angles=self.angles[keep], angular_pitch=pitch, sine_step=step)


def plane_wave_grid(probe: ProbeModel) -> IlluminationBasis:
    """Plane-wave basis matched to the probe.

    δθ = arcsin(λ_c / (2 Δu_y)). Angles sit on a lattice uniform in sin θ with
    step 2 sin δθ = λ_c / Δu_y, out to θ_max on each axis.
    """
    half_step = probe.wavelength / (2.0 * probe.aperture[1])
    if half_step >= 1.0:
        angles = np.zeros((1, 2))
        return IlluminationBasis(kind=BasisKind.PLANE_WAVE, angles=angles, angular_pitch=np.pi / 2, sine_step=2.0)

    pitch = float(np.arcsin(half_step))
    step = 2.0 * half_step
    n_side = int(np.floor(np.sin(probe.directivity_limit) / step + _FLOOR_SLACK))
    thetas = np.arcsin(step * np.arange(-n_side, n_side + 1))
    theta_y, theta_x = np.meshgrid(thetas, thetas, indexing="ij")
    angles = np.column_stack([theta_x.ravel(), theta_y.ravel()])
    logger.info(f"Plane-wave grid: {angles.shape[0]} angles, pitch {np.rad2deg(pitch):.3f} deg.")
    return IlluminationBasis(kind=BasisKind.PLANE_WAVE, angles=angles, angular_pitch=pitch, sine_step=step)


def transmit_delays(basis: IlluminationBasis, probe: ProbeModel) -> np.ndarray:
    """Emission delays τ(i, u) in µs, shape (N_in, N_elements).

    Plane waves: τ(θ, u) = (u_x sin θ_x + u_y sin θ_y) / c₀. Transducer basis:
    zero on the diagonal, elements are fired one at a time.
    """
    if basis.kind == BasisKind.TRANSDUCER:
        return np.zeros((probe.n_elements, probe.n_elements))
    assert basis.angles is not None
    sines = np.sin(basis.angles)
    return (sines @ probe.element_positions.T) / probe.sound_speed
