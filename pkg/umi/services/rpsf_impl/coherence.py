import numpy as np

from umi.services.beamformer_impl.focused import FocusedRMatrix
from umi.services.beamformer_impl.phase_law import Side
from umi.services.correction_impl.basis import CorrectionBasis
from umi.services.correction_impl.correlation import CorrelationMatrix, local_correlation
from umi.services.correction_impl.distortion import distortion
from umi.services.geometry_impl.window import SpatialWindow


def coherence_factor(correlation: CorrelationMatrix, law: np.ndarray | None = None) -> float:
    """C = |L†CL| / (N_o tr C): coherent over incoherent energy for the residual law L.

    A missing law means a flat one. Inactive basis entries are left out.
    """
    trace = float(np.real(np.trace(correlation.values)))
    if trace <= 0:
        return 0.0
    weights = np.where(correlation.active, 1.0 if law is None else np.asarray(law), 0.0).astype(np.complex128)
    form = abs(np.vdot(weights, correlation.values @ weights))
    return float(np.clip(form / (correlation.n_active * trace), 0.0, 1.0))


def window_coherence(focused: FocusedRMatrix, basis: CorrectionBasis, window: SpatialWindow, law_in: np.ndarray | None = None, min_cells: float = 4.0) -> float:
    """Coherence factor of ``window`` on the input side of ``focused``."""
    matrix = distortion(focused, basis, Side.INPUT)
    return coherence_factor(local_correlation(matrix, window, min_cells), law_in)
