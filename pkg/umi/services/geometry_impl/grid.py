from dataclasses import dataclass

import numpy as np

from umi.services.exceptions import ValidationError


def _check_axis(name: str, values: np.ndarray) -> None:
    if values.ndim != 1 or values.size == 0:
        raise ValidationError(f"Axis '{name}' must be a non-empty 1D array.")
    if values.size > 1 and not np.all(np.diff(values) > 0):
        raise ValidationError(f"Axis '{name}' must be strictly increasing.")


@dataclass(frozen=True, eq=False)
class VoxelGrid:
    """Regular lateral grid (x, y) of pitch δρ_grid and a list of depth planes z, all in mm.

    The probe center is the origin and z points along the beam axis. Lateral
    points are flattened row-major: index = iy * nx + ix.
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    pitch: float

    def __post_init__(self) -> None:
        if self.pitch <= 0:
            raise ValidationError("Grid pitch must be positive.", {"pitch": self.pitch})
        for name in ("x", "y", "z"):
            values = np.array(getattr(self, name), dtype=np.float64).ravel()
            _check_axis(name, values)
            if name != "z" and values.size > 1 and not np.allclose(np.diff(values), self.pitch, rtol=1e-6):
                raise ValidationError(f"Axis '{name}' is not regular with pitch {self.pitch}.")
            values.setflags(write=False)
            object.__setattr__(self, name, values)
        if self.z[0] <= 0:
            raise ValidationError("Depth planes must lie in front of the probe (z > 0).")

    @classmethod
    def regular(cls, x_range: tuple[float, float], y_range: tuple[float, float], z_values: np.ndarray | list[float], pitch: float) -> "VoxelGrid":
        """Grid covering [min, max] on x and y (inclusive, snapped to the pitch)."""
        return cls(x=_axis(x_range, pitch), y=_axis(y_range, pitch), z=np.asarray(z_values, dtype=np.float64), pitch=pitch)

    @property
    def nx(self) -> int:
        return int(self.x.size)

    @property
    def ny(self) -> int:
        return int(self.y.size)

    @property
    def nz(self) -> int:
        return int(self.z.size)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nz, self.ny, self.nx)

    @property
    def n_lateral(self) -> int:
        return self.nx * self.ny

    @property
    def is_planar(self) -> bool:
        """True for (y, z) grids produced by linear-array emulation."""
        return self.nx == 1

    def lateral_points(self) -> np.ndarray:
        """(N_ρ, 2) array of (x, y), row-major over (y, x)."""
        grid_y, grid_x = np.meshgrid(self.y, self.x, indexing="ij")
        return np.column_stack([grid_x.ravel(), grid_y.ravel()])

    def lateral_extent(self) -> tuple[float, float]:
        return (float(self.x[-1] - self.x[0]), float(self.y[-1] - self.y[0]))

    def depth_index(self, z: float) -> int:
        return int(np.argmin(np.abs(self.z - z)))


def _axis(bounds: tuple[float, float], pitch: float) -> np.ndarray:
    low, high = bounds
    count = int(np.floor((high - low) / pitch + 1e-9)) + 1
    return low + pitch * np.arange(count)
