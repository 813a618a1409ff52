import enum
import logging
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from umi.services.exceptions import ContractError
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.probe import ProbeModel

logger = logging.getLogger(__name__)

# Singular values below this fraction of the largest are dropped when inverting T₀.
PINV_RTOL = 1e-3


class CorrectionKind(str, enum.Enum):
    TRANSDUCER = "transducer"
    FOURIER = "fourier"


@dataclass(frozen=True, eq=False)
class CorrectionBasis:
    """Basis o in which aberration laws are expressed, and its focused-basis transmission T₀.

    Transducer: o = element positions u, T₀(ρ, u) = exp(−i k_c |u − (ρ, z)|), zero on dead elements.
    Fourier: o = spatial frequencies k on a regular grid, T₀(ρ, k) = exp(−i k·ρ).
    """

    kind: CorrectionKind
    probe: ProbeModel
    grid: VoxelGrid
    coordinates: np.ndarray
    active: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @classmethod
    def transducer(cls, probe: ProbeModel, grid: VoxelGrid) -> "CorrectionBasis":
        return cls(kind=CorrectionKind.TRANSDUCER, probe=probe, grid=grid, coordinates=probe.element_positions, active=probe.element_active)

    @classmethod
    def fourier(cls, probe: ProbeModel, grid: VoxelGrid) -> "CorrectionBasis":
        """k-grid of step 2π/L over the field, bounded by k_c sin θ_max and by the grid size per axis."""
        bound = probe.wavenumber * np.sin(probe.directivity_limit)

        def _axis(count: int) -> np.ndarray:
            if count == 1:
                return np.zeros(1)
            step = 2.0 * np.pi / (count * grid.pitch)
            half = min(int(np.floor(bound / step + 1e-9)), (count - 1) // 2)
            return step * np.arange(-half, half + 1)

        k_x, k_y = _axis(grid.nx), _axis(grid.ny)
        grid_ky, grid_kx = np.meshgrid(k_y, k_x, indexing="ij")
        coordinates = np.column_stack([grid_kx.ravel(), grid_ky.ravel()])
        logger.info(f"Fourier correction basis: {k_x.size}x{k_y.size} spatial frequencies.")
        return cls(kind=CorrectionKind.FOURIER, probe=probe, grid=grid, coordinates=coordinates, active=np.ones(coordinates.shape[0], dtype=bool))

    @classmethod
    def build(cls, kind: CorrectionKind | str, probe: ProbeModel, grid: VoxelGrid) -> "CorrectionBasis":
        kind = CorrectionKind(kind)
        return cls.transducer(probe, grid) if kind == CorrectionKind.TRANSDUCER else cls.fourier(probe, grid)

    @property
    def size(self) -> int:
        return int(self.coordinates.shape[0])

    @property
    def n_active(self) -> int:
        return int(self.active.sum())

    @property
    def anchor_index(self) -> int:
        """Central element (transducer) or k = 0 (Fourier)."""
        if self.kind == CorrectionKind.TRANSDUCER:
            return self.probe.center_index
        return int(np.argmin(np.linalg.norm(self.coordinates, axis=1)))

    def check_compatible(self, grid: VoxelGrid, probe: ProbeModel) -> None:
        same_grid = grid.shape == self.grid.shape and np.allclose(grid.x, self.grid.x) and np.allclose(grid.y, self.grid.y) and np.allclose(grid.z, self.grid.z)
        if not same_grid or probe.n_elements != self.probe.n_elements:
            raise ContractError("Correction basis was built for another grid or probe.", {"grid": grid.shape, "basis_grid": self.grid.shape})

    def _depth_key(self, z: float) -> float | None:
        return None if self.kind == CorrectionKind.FOURIER else round(float(z), 9)

    def transmission(self, z: float) -> np.ndarray:
        """T₀ at depth z, shape (N_ρ, N_o)."""
        key = ("t0", self._depth_key(z))
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        points = self.grid.lateral_points()
        if self.kind == CorrectionKind.TRANSDUCER:
            dx = points[:, np.newaxis, 0] - self.coordinates[np.newaxis, :, 0]
            dy = points[:, np.newaxis, 1] - self.coordinates[np.newaxis, :, 1]
            values = np.exp(-1j * self.probe.wavenumber * np.sqrt(dx**2 + dy**2 + z**2)) * self.active[np.newaxis, :]
        else:
            values = np.exp(-1j * (points @ self.coordinates.T))
        with self._lock:
            self._cache[key] = values
        return values

    def pseudo_inverse(self, z: float) -> np.ndarray:
        """T₀⁺ at depth z, shape (N_o, N_ρ)."""
        key = ("pinv", self._depth_key(z))
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        values = linalg.pinv(self.transmission(z), rtol=PINV_RTOL)
        with self._lock:
            self._cache[key] = values
        return values

    def anchor(self, law: np.ndarray) -> np.ndarray:
        """Remove the global phase: the anchor entry becomes real positive; inactive entries become 1."""
        law = np.asarray(law, dtype=np.complex128)
        reference = law[..., self.anchor_index]
        rotation = np.where(np.abs(reference) > 0, np.conj(reference) / np.maximum(np.abs(reference), 1e-300), 1.0)
        anchored = law * rotation[..., np.newaxis]
        return np.where(self.active, anchored, 1.0)
