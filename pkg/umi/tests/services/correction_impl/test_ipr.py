import logging

import numpy as np
import pytest

from umi.services.correction_impl.ipr import contrast_gain_db, iterative_phase_reversal
from umi.services.correction_impl.reciprocity import circular_correlation
from umi.services.exceptions import ContractError


class TestIterativePhaseReversal:
    def test_rank_one_matrix_gives_its_law(self, make_correlation, random_law):
        law = random_law(16)
        correlation = make_correlation(np.outer(law, law.conj()))

        result = iterative_phase_reversal(correlation)

        assert result.converged
        assert result.iterations <= 2
        assert circular_correlation(result.law, law, correlation.active) == pytest.approx(1.0, abs=1e-9)

    def test_identity_keeps_the_initial_law(self, make_correlation, random_law):
        initial = random_law(9)
        correlation = make_correlation(np.eye(9, dtype=np.complex128))

        result = iterative_phase_reversal(correlation, initial=initial)

        assert result.converged
        assert result.iterations == 1
        assert np.allclose(result.law, initial)
        assert contrast_gain_db(correlation, result.law, initial) == pytest.approx(0.0)

    def test_quadratic_form_never_decreases(self, make_correlation, rng):
        a = rng.standard_normal((12, 30)) + 1j * rng.standard_normal((12, 30))
        correlation = make_correlation(a @ a.conj().T / 30)

        result = iterative_phase_reversal(correlation, max_iterations=50)

        forms = np.array(result.quadratic_forms)
        assert np.all(np.diff(forms) >= -1e-9 * forms.max())

    def test_result_is_anchored_and_unit_modulus(self, make_correlation, random_law):
        law = random_law(16)
        result = iterative_phase_reversal(make_correlation(np.outer(law, law.conj())), anchor_index=5)
        assert result.law[5] == pytest.approx(1.0)
        assert np.allclose(np.abs(result.law), 1.0)

    def test_inactive_entries_are_neutral(self, make_correlation, random_law):
        law = random_law(8)
        active = np.ones(8, dtype=bool)
        active[3] = False
        values = np.outer(law, law.conj())
        values[3, :] = 0
        values[:, 3] = 0

        result = iterative_phase_reversal(make_correlation(values, active))

        assert result.law[3] == 1.0
        assert circular_correlation(result.law, law, active) == pytest.approx(1.0, abs=1e-9)

    def test_flags_non_convergence(self, make_correlation, rng, caplog):
        a = rng.standard_normal((12, 30)) + 1j * rng.standard_normal((12, 30))
        with caplog.at_level(logging.WARNING):
            result = iterative_phase_reversal(make_correlation(a @ a.conj().T), max_iterations=1)
        assert not result.converged
        assert result.iterations == 1
        assert "did not converge" in caplog.text

    def test_rejects_non_hermitian_matrix(self, make_correlation, rng):
        with pytest.raises(ContractError, match="Hermitian"):
            iterative_phase_reversal(make_correlation(rng.standard_normal((4, 4)) + 1j * np.triu(np.ones((4, 4)))))

    def test_contrast_gain_is_positive_for_the_right_law(self, make_correlation, random_law):
        law = random_law(16)
        correlation = make_correlation(np.outer(law, law.conj()))
        assert contrast_gain_db(correlation, law) > 3.0
