"""Per-voxel aberration laws assembled from window estimates.

A layer holds the laws of one schedule step together with separable tent
weights centered on each window; 50%-overlapping windows then blend
bilinearly. Blending interpolates e^{iφ} and renormalizes, so phases never
wrap at window seams. A field is the product of its layers.
"""

from dataclasses import dataclass

import numpy as np

from umi.services.exceptions import ContractError, ValidationError
from umi.services.geometry_impl.window import SpatialWindow

from .basis import CorrectionBasis


def _unit(values: np.ndarray) -> np.ndarray:
    magnitude = np.abs(values)
    return np.where(magnitude > 0, values / np.where(magnitude > 0, magnitude, 1.0), 1.0)


def _tent(values: np.ndarray, center: float, half_width: float) -> np.ndarray:
    return np.clip(1.0 - np.abs(values - center) / half_width, 0.0, None)


@dataclass(frozen=True, eq=False)
class LawLayer:
    """Window laws (K, N_o) with lateral weights (N_ρ, K), depth weights (nz, K) and window centers (K, 3)."""

    laws: np.ndarray
    lateral_weights: np.ndarray
    depth_weights: np.ndarray
    centers: np.ndarray

    def at(self, iz: int, points: np.ndarray, z: float) -> np.ndarray:
        weights = self.lateral_weights * self.depth_weights[iz][np.newaxis, :]
        mixed = weights @ self.laws
        uncovered = ~np.any(weights > 0, axis=1)
        if np.any(uncovered):
            distance = np.hypot(points[uncovered, 0, np.newaxis] - self.centers[np.newaxis, :, 0], points[uncovered, 1, np.newaxis] - self.centers[np.newaxis, :, 1])
            distance = np.hypot(distance, z - self.centers[np.newaxis, :, 2])
            mixed[uncovered] = self.laws[np.argmin(distance, axis=1)]
        return _unit(mixed)

    def conjugate(self) -> "LawLayer":
        return LawLayer(laws=np.conj(self.laws), lateral_weights=self.lateral_weights, depth_weights=self.depth_weights, centers=self.centers)


@dataclass(frozen=True, eq=False)
class LawField:
    """Aberration laws L(ρ, z, o) on ``basis``; ``at(iz)`` returns the (N_ρ, N_o) laws of one depth.

    Row ρ is the guide-star voxel the law applies to. Inactive basis entries hold 1.
    """

    basis: CorrectionBasis
    layers: tuple[LawLayer, ...] = ()

    @classmethod
    def flat(cls, basis: CorrectionBasis) -> "LawField":
        return cls(basis=basis)

    @classmethod
    def uniform(cls, basis: CorrectionBasis, law: np.ndarray) -> "LawField":
        """Same law for every voxel."""
        law = np.asarray(law, dtype=np.complex128)
        if law.shape != (basis.size,):
            raise ContractError("Law length does not match the correction basis.", {"length": law.shape, "expected": basis.size})
        if not np.allclose(np.abs(law[basis.active]), 1.0, atol=1e-4):
            raise ValidationError("Aberration laws must have unit modulus.")
        grid = basis.grid
        layer = LawLayer(
            laws=np.where(basis.active, law, 1.0)[np.newaxis, :],
            lateral_weights=np.ones((grid.n_lateral, 1)),
            depth_weights=np.ones((grid.nz, 1)),
            centers=np.array([[float(np.mean(grid.x)), float(np.mean(grid.y)), float(np.mean(grid.z))]]),
        )
        return cls(basis=basis, layers=(layer,))

    @classmethod
    def blend(cls, basis: CorrectionBasis, windows: list[SpatialWindow], laws: list[np.ndarray]) -> "LawField":
        """Per-voxel field from window laws; voxels outside every tent take the law of the nearest window."""
        if len(windows) != len(laws) or not windows:
            raise ContractError("Blending needs one law per window.", {"windows": len(windows), "laws": len(laws)})
        grid = basis.grid
        points = grid.lateral_points()
        stacked = np.stack([basis.anchor(law) for law in laws])
        if stacked.shape[1] != basis.size:
            raise ContractError("Law length does not match the correction basis.", {"length": stacked.shape[1], "expected": basis.size})
        lateral = np.empty((grid.n_lateral, len(windows)))
        depth = np.empty((grid.nz, len(windows)))
        for k, window in enumerate(windows):
            xc, yc, zc = window.center
            tent_x = np.ones(grid.n_lateral) if grid.is_planar else _tent(points[:, 0], xc, window.lateral_extent[0] / 2.0)
            lateral[:, k] = tent_x * _tent(points[:, 1], yc, window.lateral_extent[1] / 2.0)
            depth[:, k] = _tent(grid.z, zc, window.axial_extent / 2.0)
        layer = LawLayer(laws=stacked, lateral_weights=lateral, depth_weights=depth, centers=np.array([w.center for w in windows], dtype=np.float64))
        return cls(basis=basis, layers=(layer,))

    @property
    def is_flat(self) -> bool:
        return not self.layers

    def conjugate(self) -> "LawField":
        return LawField(basis=self.basis, layers=tuple(layer.conjugate() for layer in self.layers))

    def compose(self, other: "LawField") -> "LawField":
        """Multiplicative composition L·L′ (apply ``self`` then ``other``)."""
        if other.basis.kind != self.basis.kind or other.basis.size != self.basis.size:
            raise ContractError("Cannot compose laws built on different bases.")
        return LawField(basis=self.basis, layers=self.layers + other.layers)

    def at(self, iz: int) -> np.ndarray:
        grid = self.basis.grid
        result = np.ones((grid.n_lateral, self.basis.size), dtype=np.complex128)
        if not self.layers:
            return result
        points = grid.lateral_points()
        for layer in self.layers:
            result *= layer.at(iz, points, float(grid.z[iz]))
        return result

    def at_point(self, center: tuple[float, float, float]) -> np.ndarray:
        """Law of the voxel nearest to ``center``."""
        grid = self.basis.grid
        iz = grid.depth_index(center[2])
        iy = int(np.argmin(np.abs(grid.y - center[1])))
        ix = int(np.argmin(np.abs(grid.x - center[0])))
        return self.at(iz)[iy * grid.nx + ix]
