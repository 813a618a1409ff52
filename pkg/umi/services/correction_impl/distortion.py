import logging
from dataclasses import dataclass

import numpy as np

from umi.services.beamformer_impl.focused import FocusedRMatrix
from umi.services.beamformer_impl.phase_law import Side, project_rows

from .basis import CorrectionBasis

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DistortionMatrix:
    """D(ρ, o, z) = (R × T₀)(ρ, o) · T₀*(ρ, o), shape (nz, N_ρ, N_o).

    Output side: rows are input voxels ρ_in and o spans the output basis.
    Input side: the same construction on Rᵀ.
    """

    basis: CorrectionBasis
    side: Side
    values: np.ndarray

    @property
    def grid(self):
        return self.basis.grid


def distortion(focused: FocusedRMatrix, basis: CorrectionBasis, side: Side | str) -> DistortionMatrix:
    side = Side(side)
    basis.check_compatible(focused.grid, focused.probe)
    work = focused.transposed() if side == Side.INPUT else focused
    neighbours = work.neighbour_table
    flat = work.flat_blocks

    values = np.empty((work.grid.nz, work.grid.n_lateral, basis.size), dtype=np.complex128)
    for iz, z in enumerate(work.grid.z):
        transmission = basis.transmission(float(z))
        values[iz] = project_rows(flat[iz].astype(np.complex128), neighbours, transmission) * np.conj(transmission)
    logger.debug(f"Built {side.value} distortion matrix on the {basis.kind.value} basis, {values.shape}.")
    return DistortionMatrix(basis=basis, side=side, values=values)
