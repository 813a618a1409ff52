"""Iterative phase reversal: T̂⁽ⁿ⁾ = exp(i arg(C × T̂⁽ⁿ⁻¹⁾)).

A phase-only power iteration. Unlike the leading eigenvector it gives every
basis entry the same weight, so the estimate covers the whole aperture even
when C is dominated by part of it.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from umi.services.exceptions import ContractError

from .correlation import CorrelationMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IprResult:
    law: np.ndarray
    iterations: int
    converged: bool
    quadratic_forms: list[float] = field(default_factory=list)

    @property
    def final_quadratic_form(self) -> float:
        return self.quadratic_forms[-1] if self.quadratic_forms else 0.0


def quadratic_form(values: np.ndarray, law: np.ndarray) -> float:
    """T̂† C T̂ (real for Hermitian C)."""
    return float(np.real(np.vdot(law, values @ law)))


def _phase_of(product: np.ndarray, previous: np.ndarray, active: np.ndarray) -> np.ndarray:
    magnitude = np.abs(product)
    law = np.where(magnitude > 0, product / np.where(magnitude > 0, magnitude, 1.0), previous)
    return np.where(active, law, 1.0)


def iterative_phase_reversal(
    correlation: CorrelationMatrix,
    initial: np.ndarray | None = None,
    tolerance: float = 1e-8,
    max_iterations: int = 200,
    anchor_index: int | None = None,
) -> IprResult:
    """Estimate the unit-modulus law that best focuses the window's virtual guide star.

    Args:
        correlation: Hermitian local correlation matrix.
        initial: Starting law T̂⁰; flat when omitted.
        tolerance: Stop once 1 − |⟨T̂⁽ⁿ⁾, T̂⁽ⁿ⁻¹⁾⟩| / N_u falls below it.
        max_iterations: Iteration cap; reaching it is reported as non-convergence.
        anchor_index: Entry whose phase is set to zero in the result.
    """
    values = correlation.values
    if not correlation.is_hermitian():
        raise ContractError("Correlation matrix is not Hermitian.")
    active = correlation.active
    n_active = max(int(active.sum()), 1)

    law = np.ones(correlation.size, dtype=np.complex128) if initial is None else np.asarray(initial, dtype=np.complex128).copy()
    if law.shape != (correlation.size,):
        raise ContractError("Initial law does not match the correlation matrix.", {"length": law.shape, "expected": correlation.size})
    law = np.where(active, law / np.where(np.abs(law) > 0, np.abs(law), 1.0), 1.0)

    forms = [quadratic_form(values, law)]
    converged = False
    iterations = 0
    while iterations < max_iterations:
        iterations += 1
        updated = _phase_of(values @ law, law, active)
        overlap = abs(np.vdot(law[active], updated[active])) / n_active
        law = updated
        forms.append(quadratic_form(values, law))
        if 1.0 - overlap < tolerance:
            converged = True
            break

    if not converged:
        logger.warning(f"Phase reversal did not converge within {max_iterations} iterations.")
    if anchor_index is not None and active[anchor_index]:
        reference = law[anchor_index]
        law = np.where(active, law * np.conj(reference), 1.0)
    return IprResult(law=law, iterations=iterations, converged=converged, quadratic_forms=forms)


def contrast_gain_db(correlation: CorrelationMatrix, law: np.ndarray, reference: np.ndarray | None = None) -> float:
    """Coherent-energy gain 10 log₁₀(T̂†CT̂ / T⁰†CT⁰) of ``law`` over ``reference`` (flat by default)."""
    reference = np.ones(correlation.size, dtype=np.complex128) if reference is None else reference
    before = quadratic_form(correlation.values, np.where(correlation.active, reference, 0.0))
    after = quadratic_form(correlation.values, np.where(correlation.active, law, 0.0))
    if before <= 0 or after <= 0:
        return 0.0
    return float(10.0 * np.log10(after / before))
