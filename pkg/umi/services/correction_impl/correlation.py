import logging
from dataclasses import dataclass

import numpy as np

from umi.services.exceptions import WindowError
from umi.services.geometry_impl.window import SpatialWindow

from .distortion import DistortionMatrix

logger = logging.getLogger(__name__)

MIN_RESOLUTION_CELLS = 4.0


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Local correlation C(o, o′, r_p) of the distortion matrix over one window.

    Attributes:
        values: Hermitian (N_o, N_o) matrix; rows and columns of inactive basis entries are zero.
        n_samples: Number of voxels averaged.
        resolution_cells: N_W, independent speckle realizations in the window.
    """

    window: SpatialWindow
    values: np.ndarray
    active: np.ndarray
    n_samples: int
    resolution_cells: float

    @property
    def size(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_active(self) -> int:
        return int(self.active.sum())

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.values, self.values.conj().T, atol=atol * max(np.abs(self.values).max(), 1.0)))


def window_rows(distortion: DistortionMatrix, window: SpatialWindow) -> np.ndarray:
    """Rows D(r, ·) for every voxel r inside ``window``, stacked over depth."""
    grid = distortion.grid
    lateral = window.lateral_mask(grid).ravel()
    depths = np.flatnonzero(window.depth_mask(grid))
    if not lateral.any() or depths.size == 0:
        raise WindowError("Window contains no voxel of the grid.", {"center": window.center})
    return distortion.values[depths][:, lateral].reshape(-1, distortion.values.shape[2])


def local_correlation(distortion: DistortionMatrix, window: SpatialWindow, min_cells: float = MIN_RESOLUTION_CELLS) -> CorrelationMatrix:
    """C(o, o′) = ⟨D(r, o) D*(r, o′)⟩ over the voxels r of the window."""
    basis = distortion.basis
    cells = window.resolution_cells(basis.probe)
    if cells < min_cells:
        raise WindowError(f"Window covers {cells:.1f} resolution cells; at least {min_cells:g} are needed.", {"center": window.center, "resolution_cells": cells})
    rows = window_rows(distortion, window)

    values = rows.T @ rows.conj() / rows.shape[0]
    values = (values + values.conj().T) / 2.0
    inactive = ~basis.active
    values[inactive, :] = 0.0
    values[:, inactive] = 0.0
    return CorrelationMatrix(window=window, values=values, active=basis.active, n_samples=int(rows.shape[0]), resolution_cells=cells)


def perturbation_ratio(samples: np.ndarray) -> float:
    """⟨|δC|²⟩ / ⟨|C|²⟩ over realizations of the same correlation matrix, ``samples`` shaped (K, N_o, N_o)."""
    samples = np.asarray(samples)
    if samples.ndim != 3 or samples.shape[0] < 2:
        raise WindowError("Perturbation ratio needs at least two realizations.", {"shape": samples.shape})
    mean = samples.mean(axis=0)
    fluctuation = np.mean(np.abs(samples - mean) ** 2)
    return float(fluctuation / np.mean(np.abs(samples) ** 2))
