"""Gauge-invariant comparisons between aberration laws.

Laws are defined up to a global phase. Reciprocity scores fix it by anchoring
both laws and keep the real part of their inner product. Bias and correlation
against a known law use the modulus. Inner products run over active entries
only.
"""

from dataclasses import dataclass

import numpy as np

from umi.services.exceptions import ContractError

from .basis import CorrectionBasis


@dataclass(frozen=True)
class ReciprocityScore:
    epsilon: float
    scalar_product: float


def _pair(first: np.ndarray, second: np.ndarray, basis: CorrectionBasis, anchored: bool = False) -> tuple[np.ndarray, np.ndarray]:
    first = np.asarray(first, dtype=np.complex128)
    second = np.asarray(second, dtype=np.complex128)
    if first.shape != (basis.size,) or second.shape != (basis.size,):
        raise ContractError("Laws do not match the correction basis.", {"shapes": (first.shape, second.shape), "expected": basis.size})
    if anchored:
        first, second = basis.anchor(first), basis.anchor(second)
    return first[basis.active], second[basis.active]


def _unit(values: np.ndarray) -> np.ndarray:
    magnitude = np.abs(values)
    return np.where(magnitude > 0, values / np.where(magnitude > 0, magnitude, 1.0), 0.0)


def scalar_product(first: np.ndarray, second: np.ndarray, basis: CorrectionBasis) -> float:
    """Re(N_u⁻¹ first† second) once both laws are anchored on the basis reference entry."""
    a, b = _pair(first, second, basis, anchored=True)
    return float(np.real(np.vdot(a, b)) / max(a.size, 1))


def reciprocity_score(law_in: np.ndarray, law_out: np.ndarray, basis: CorrectionBasis) -> ReciprocityScore:
    """ε = 2(1 − Re(N_u⁻¹ T̂_in† T̂_out)) after anchoring."""
    product = scalar_product(law_in, law_out, basis)
    return ReciprocityScore(epsilon=2.0 * (1.0 - product), scalar_product=product)


def estimator_bias(estimate: np.ndarray, truth: np.ndarray, basis: CorrectionBasis) -> float:
    """‖δT̂‖² = 2(1 − |N_u⁻¹ T† T̂|) against a ground-truth law (truth is reduced to its phase)."""
    a, b = _pair(_unit(np.asarray(truth, dtype=np.complex128)), estimate, basis)
    return float(2.0 * (1.0 - abs(np.vdot(a, b)) / max(a.size, 1)))


def circular_correlation(estimate: np.ndarray, truth: np.ndarray, active: np.ndarray) -> float:
    """|Σ e^{i(arg T̂ − arg T)}| / N_u over active entries, in [0, 1] and gauge invariant."""
    mask = np.asarray(active, dtype=bool)
    a = _unit(np.asarray(truth, dtype=np.complex128)[mask])
    b = _unit(np.asarray(estimate, dtype=np.complex128)[mask])
    if a.size == 0:
        return 0.0
    return float(abs(np.vdot(a, b)) / a.size)
