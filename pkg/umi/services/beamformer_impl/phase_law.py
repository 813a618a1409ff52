"""Re-focusing a focused matrix through a phase-conjugated aberration law.

For each depth and each row ρ (the guide-star voxel of the corrected side) the
transmission T₀ is restricted to the row's offset band, T_b = U S V†. The
adjoint re-focusing T_b diag(L*) T_b† reads U (S V† diag(L*) V S) U†; its
unitary polar factor W acts on the row, r′ = r + (r U)(W − 1) U†. On a unitary
band this is r + [(r T_b) ∘ (L* − 1)] T_b⁺. A flat law gives W = 1 and the
conjugate law gives W†, so applying L then L* restores R for any band, and
the row energy is kept.
"""

import enum
import logging

import numpy as np

from umi.services.correction_impl.basis import PINV_RTOL, CorrectionBasis
from umi.services.correction_impl.laws import LawField
from umi.services.exceptions import ContractError

from .focused import FocusedRMatrix

logger = logging.getLogger(__name__)

# Rows decomposed per batch; bounds the (rows, N_off, N_o) working set.
ROW_CHUNK = 64


class Side(str, enum.Enum):
    INPUT = "input"
    OUTPUT = "output"


def project_rows(band: np.ndarray, neighbours: np.ndarray, transmission: np.ndarray) -> np.ndarray:
    """R × T₀ for a banded block: (N_ρ, N_off) × (N_ρ, N_o) → (N_ρ, N_o)."""
    result = np.zeros((band.shape[0], transmission.shape[1]), dtype=np.complex128)
    for q in range(neighbours.shape[1]):
        targets = neighbours[:, q]
        rows = np.flatnonzero(targets >= 0)
        if rows.size:
            result[rows] += band[rows, q, np.newaxis] * transmission[targets[rows]]
    return result


def band_transmission(neighbours: np.ndarray, transmission: np.ndarray) -> np.ndarray:
    """T₀ rows seen by each band entry, (N_ρ, N_off, N_o); zero on invalid offsets."""
    valid = neighbours >= 0
    return np.where(valid[..., np.newaxis], transmission[np.clip(neighbours, 0, None)], 0.0)


def polar_unitary(matrices: np.ndarray) -> np.ndarray:
    """Unitary factor of the polar decomposition of a stack of square matrices."""
    left, _, right = np.linalg.svd(matrices)
    return left @ right


def correct_rows(band: np.ndarray, neighbours: np.ndarray, transmission: np.ndarray, law: np.ndarray) -> np.ndarray:
    """Apply the per-row law ``law`` (N_ρ, N_o) to the banded rows ``band`` (N_ρ, N_off)."""
    result = band.copy()
    for start in range(0, band.shape[0], ROW_CHUNK):
        rows = slice(start, start + ROW_CHUNK)
        left, singular, right = np.linalg.svd(band_transmission(neighbours[rows], transmission), full_matrices=False)
        kept = (singular > PINV_RTOL * singular[:, :1]) & (singular > 0)
        left = left * kept[:, np.newaxis, :]
        right = right * kept[..., np.newaxis]
        identity = np.eye(singular.shape[1])
        # dropped modes get an identity block so the polar factor leaves them alone
        weights = singular * kept
        compressed = weights[:, :, np.newaxis] * ((right * law[rows, np.newaxis, :]) @ np.conj(np.swapaxes(right, 1, 2))) * weights[:, np.newaxis, :]
        gain = polar_unitary(compressed + identity * ~kept[:, np.newaxis, :]) - identity
        coefficients = np.einsum("pq,pqk->pk", band[rows], left)
        result[rows] += np.einsum("pl,pql->pq", np.einsum("pk,pkl->pl", coefficients, gain), np.conj(left))
    return result


def _resolve_law(law: LawField | np.ndarray, basis: CorrectionBasis) -> LawField:
    if isinstance(law, LawField):
        if law.basis.kind != basis.kind or law.basis.size != basis.size:
            raise ContractError("Phase law and correction basis disagree.", {"law_basis": law.basis.kind.value, "basis": basis.kind.value})
        return law
    vector = np.asarray(law)
    if vector.shape != (basis.size,):
        raise ContractError("Phase law length does not match the correction basis.", {"length": vector.shape, "expected": basis.size})
    return LawField.uniform(basis, vector)


def apply_phase_law(focused: FocusedRMatrix, law: LawField | np.ndarray, basis: CorrectionBasis, side: Side | str) -> FocusedRMatrix:
    """Compensate ``law`` on one side of ``focused``.

    Args:
        focused: Matrix to correct.
        law: Per-voxel LawField or a single law vector on ``basis``.
        basis: Correction basis the law is expressed in.
        side: ``output`` corrects ρ_out for each guide star ρ_in; ``input`` the reverse.
    """
    side = Side(side)
    basis.check_compatible(focused.grid, focused.probe)
    field = _resolve_law(law, basis)

    work = focused.transposed() if side == Side.INPUT else focused
    neighbours = work.neighbour_table
    flat = work.flat_blocks
    corrected = np.empty(flat.shape, dtype=np.complex128)
    for iz, z in enumerate(work.grid.z):
        band = flat[iz].astype(np.complex128)
        conjugate = np.conj(field.at(iz))
        if np.all(conjugate == 1.0):
            corrected[iz] = band
            continue
        corrected[iz] = correct_rows(band, neighbours, basis.transmission(float(z)), conjugate)

    result = work.with_blocks(corrected)
    logger.info(f"Applied {basis.kind.value} phase law on the {side.value} side.")
    return result.transposed() if side == Side.INPUT else result
