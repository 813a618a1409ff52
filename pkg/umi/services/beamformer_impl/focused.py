import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from umi.services.exceptions import ContractError, ValidationError
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.illumination import BasisKind
from umi.services.geometry_impl.probe import ProbeModel

logger = logging.getLogger(__name__)


def offset_extent(grid: VoxelGrid, max_offset: float) -> tuple[int, int]:
    """Half-widths (K_y, K_x) of the offset band in grid steps; K_x is 0 on planar grids."""
    steps = int(np.floor(max_offset / grid.pitch + 1e-9))
    return (min(steps, grid.ny - 1), 0 if grid.is_planar else min(steps, grid.nx - 1))


@dataclass(frozen=True, eq=False)
class FocusedRMatrix:
    """Broadband focused reflection matrix R(ρ_in, ρ_out, z) restricted to |ρ_out − ρ_in| ≤ Δρ_max.

    ``blocks`` has shape (nz, ny, nx, 2K_y + 1, 2K_x + 1): entry [iz, iy, ix, ky, kx]
    holds R between ρ_in = (x[ix], y[iy]) and ρ_out = ρ_in + ((kx − K_x)δρ, (ky − K_y)δρ)
    at depth z[iz]. Entries whose ρ_out leaves the grid or the offset disc are zero.
    """

    grid: VoxelGrid
    max_offset: float
    blocks: np.ndarray
    probe: ProbeModel
    input_basis: BasisKind = BasisKind.TRANSDUCER
    apodization: str = "cone"
    sound_speed: float = field(default=0.0)

    def __post_init__(self) -> None:
        if self.max_offset < 0:
            raise ValidationError("Maximum offset must be >= 0.", {"max_offset": self.max_offset})
        k_y, k_x = offset_extent(self.grid, self.max_offset)
        expected = (*self.grid.shape, 2 * k_y + 1, 2 * k_x + 1)
        blocks = np.asarray(self.blocks, dtype=np.complex64)
        if blocks.shape != expected:
            raise ContractError("Focused blocks do not match the grid and offset band.", {"shape": blocks.shape, "expected": expected})
        blocks = np.where(self.valid_mask[np.newaxis], blocks, 0).astype(np.complex64)
        blocks.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)
        if self.sound_speed <= 0:
            object.__setattr__(self, "sound_speed", self.probe.sound_speed)

    @classmethod
    def zeros(cls, grid: VoxelGrid, max_offset: float, probe: ProbeModel, **provenance) -> "FocusedRMatrix":
        k_y, k_x = offset_extent(grid, max_offset)
        return cls(grid=grid, max_offset=max_offset, blocks=np.zeros((*grid.shape, 2 * k_y + 1, 2 * k_x + 1), dtype=np.complex64), probe=probe, **provenance)

    @classmethod
    def from_dense(cls, grid: VoxelGrid, max_offset: float, dense: np.ndarray, probe: ProbeModel, **provenance) -> "FocusedRMatrix":
        """Build from (nz, N_ρ, N_ρ) dense blocks indexed [z, in, out]; entries outside the band are dropped."""
        template = cls.zeros(grid, max_offset, probe, **provenance)
        table = template.neighbour_table
        rows = np.arange(grid.n_lateral)[:, np.newaxis]
        gathered = np.where(table >= 0, np.asarray(dense)[:, rows, np.clip(table, 0, None)], 0)
        return template.with_blocks(gathered.reshape(template.blocks.shape))

    @property
    def offset_shape(self) -> tuple[int, int]:
        return (int(self.blocks.shape[3]), int(self.blocks.shape[4]))

    @property
    def n_offsets(self) -> int:
        return self.offset_shape[0] * self.offset_shape[1]

    @cached_property
    def offsets(self) -> np.ndarray:
        """(N_off, 2) lateral offsets (Δx, Δy) in mm, row-major over (ky, kx)."""
        k_y, k_x = (self.offset_shape[0] - 1) // 2, (self.offset_shape[1] - 1) // 2
        d_y, d_x = np.meshgrid(np.arange(-k_y, k_y + 1), np.arange(-k_x, k_x + 1), indexing="ij")
        return self.grid.pitch * np.column_stack([d_x.ravel(), d_y.ravel()]).astype(np.float64)

    @cached_property
    def valid_mask(self) -> np.ndarray:
        """(ny, nx, O_y, O_x) True where ρ_out lies on the grid and inside the offset disc."""
        k_y, k_x = offset_extent(self.grid, self.max_offset)
        d_y = np.arange(-k_y, k_y + 1)
        d_x = np.arange(-k_x, k_x + 1)
        in_disc = (d_y[:, np.newaxis] ** 2 + d_x[np.newaxis, :] ** 2) * self.grid.pitch**2 <= self.max_offset**2 + 1e-9
        target_y = np.arange(self.grid.ny)[:, np.newaxis] + d_y[np.newaxis, :]
        target_x = np.arange(self.grid.nx)[:, np.newaxis] + d_x[np.newaxis, :]
        on_y = (target_y >= 0) & (target_y < self.grid.ny)
        on_x = (target_x >= 0) & (target_x < self.grid.nx)
        mask = on_y[:, np.newaxis, :, np.newaxis] & on_x[np.newaxis, :, np.newaxis, :] & in_disc[np.newaxis, np.newaxis]
        mask.setflags(write=False)
        return mask

    @cached_property
    def neighbour_table(self) -> np.ndarray:
        """(N_ρ, N_off) flat lateral index of ρ_out for each (ρ_in, offset), −1 when invalid."""
        k_y, k_x = (self.offset_shape[0] - 1) // 2, (self.offset_shape[1] - 1) // 2
        i_y, i_x = np.meshgrid(np.arange(self.grid.ny), np.arange(self.grid.nx), indexing="ij")
        d_y, d_x = np.meshgrid(np.arange(-k_y, k_y + 1), np.arange(-k_x, k_x + 1), indexing="ij")
        target = (i_y.ravel()[:, np.newaxis] + d_y.ravel()[np.newaxis, :]) * self.grid.nx + i_x.ravel()[:, np.newaxis] + d_x.ravel()[np.newaxis, :]
        table = np.where(self.valid_mask.reshape(self.grid.n_lateral, -1), target, -1).astype(np.int64)
        table.setflags(write=False)
        return table

    @property
    def flat_blocks(self) -> np.ndarray:
        """(nz, N_ρ, N_off) view of the blocks."""
        return self.blocks.reshape(self.grid.nz, self.grid.n_lateral, self.n_offsets)

    @property
    def center_offset(self) -> int:
        return self.n_offsets // 2

    def with_blocks(self, blocks: np.ndarray) -> "FocusedRMatrix":
        return FocusedRMatrix(
            grid=self.grid,
            max_offset=self.max_offset,
            blocks=np.asarray(blocks).reshape(self.blocks.shape),
            probe=self.probe,
            input_basis=self.input_basis,
            apodization=self.apodization,
            sound_speed=self.sound_speed,
        )

    def diagonal(self) -> np.ndarray:
        """Confocal entries R(ρ, ρ, z), shape (nz, ny, nx)."""
        k_y, k_x = (self.offset_shape[0] - 1) // 2, (self.offset_shape[1] - 1) // 2
        return self.blocks[:, :, :, k_y, k_x]

    def transposed(self) -> "FocusedRMatrix":
        """Rᵀ: swap the roles of ρ_in and ρ_out."""
        flat = self.flat_blocks
        table = self.neighbour_table
        # offset q maps to −q, which is the mirrored index in the row-major offset list
        mirrored = self.n_offsets - 1 - np.arange(self.n_offsets)
        swapped = np.where(table[np.newaxis] >= 0, flat[:, np.clip(table, 0, None), mirrored[np.newaxis, :]], 0)
        return self.with_blocks(swapped)

    def dense_block(self, iz: int) -> np.ndarray:
        """(N_ρ, N_ρ) matrix [in, out] at depth index ``iz``, zero outside the band."""
        dense = np.zeros((self.grid.n_lateral, self.grid.n_lateral), dtype=np.complex64)
        rows, cols = np.nonzero(self.neighbour_table >= 0)
        dense[rows, self.neighbour_table[rows, cols]] = self.flat_blocks[iz, rows, cols]
        return dense

    def confocal(self) -> "ConfocalVolume":
        return ConfocalVolume(grid=self.grid, intensity=np.abs(self.diagonal()) ** 2)

    def energy(self) -> float:
        return float(np.sum(np.abs(self.blocks.astype(np.complex128)) ** 2))


@dataclass(frozen=True, eq=False)
class ConfocalVolume:
    """Confocal intensity I(ρ, z) = |R(ρ, ρ, z)|², shape (nz, ny, nx)."""

    grid: VoxelGrid
    intensity: np.ndarray

    def __post_init__(self) -> None:
        intensity = np.asarray(self.intensity, dtype=np.float64)
        if intensity.shape != self.grid.shape:
            raise ContractError("Confocal volume does not match the grid.", {"shape": intensity.shape, "expected": self.grid.shape})
        intensity.setflags(write=False)
        object.__setattr__(self, "intensity", intensity)

    def in_db(self, floor_db: float = -60.0) -> np.ndarray:
        peak = self.intensity.max()
        if peak <= 0:
            return np.full(self.intensity.shape, floor_db)
        return np.maximum(10.0 * np.log10(np.maximum(self.intensity / peak, 1e-30)), floor_db)

    def peak_index(self) -> tuple[int, int, int]:
        return tuple(int(i) for i in np.unravel_index(np.argmax(self.intensity), self.intensity.shape))  # type: ignore[return-value]


def confocal(focused: FocusedRMatrix) -> ConfocalVolume:
    return focused.confocal()


def with_symmetric_background(focused: FocusedRMatrix, power: float, rng: np.random.Generator) -> FocusedRMatrix:
    """Add a symmetric random component of mean power ``power`` × mean confocal intensity."""
    if power < 0:
        raise ContractError("Background power must be >= 0.", {"power": power})
    if power == 0:
        return focused
    draws = rng.standard_normal((*focused.blocks.shape, 2))
    noise = focused.with_blocks((draws[..., 0] + 1j * draws[..., 1]) / np.sqrt(2.0))
    symmetric = (noise.blocks.astype(np.complex128) + noise.transposed().blocks) / 2.0
    valid = np.broadcast_to(focused.valid_mask[np.newaxis], symmetric.shape)
    target = power * float(np.mean(np.abs(focused.diagonal().astype(np.complex128)) ** 2))
    current = float(np.mean(np.abs(symmetric[valid]) ** 2))
    if current > 0:
        symmetric *= np.sqrt(target / current)
    logger.info(f"Injected symmetric focused background at relative power {power}.")
    return focused.with_blocks(focused.blocks + symmetric)
