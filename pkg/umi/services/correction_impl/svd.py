from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .correlation import CorrelationMatrix


@dataclass(frozen=True)
class SvdResult:
    """Eigen-decomposition of a correlation matrix, eigenvalues in descending order."""

    eigenvalues: np.ndarray
    first_vector: np.ndarray

    @property
    def effective_rank(self) -> float:
        return participation_ratio(self.eigenvalues)


def participation_ratio(eigenvalues: np.ndarray) -> float:
    """(Σλ)² / Σλ²; 0 for an all-zero spectrum."""
    spectrum = np.clip(np.asarray(eigenvalues, dtype=np.float64), 0.0, None)
    energy = float(np.sum(spectrum**2))
    return float(np.sum(spectrum) ** 2 / energy) if energy > 0 else 0.0


def expected_rank(input_psf_width: float, diffraction_limit: float) -> float:
    """Number of resolution cells covered by the input focal spot, (δρ_in / δρ₀)²."""
    return float((input_psf_width / diffraction_limit) ** 2)


def svd_baseline(correlation: CorrelationMatrix) -> SvdResult:
    eigenvalues, eigenvectors = linalg.eigh(correlation.values)
    order = np.argsort(eigenvalues)[::-1]
    return SvdResult(eigenvalues=eigenvalues[order], first_vector=eigenvectors[:, order[0]])


def aperture_coverage(correlation: CorrelationMatrix, law: np.ndarray, threshold: float = 0.5) -> float:
    """Fraction of active entries where |C × law| exceeds ``threshold`` times its maximum."""
    active = correlation.active
    amplitude = np.abs(correlation.values @ np.where(active, law, 0.0))[active]
    if amplitude.size == 0 or amplitude.max() <= 0:
        return 0.0
    return float(np.mean(amplitude > threshold * amplitude.max()))
