import numpy as np
import pytest

from umi.services.correction_impl.basis import CorrectionBasis
from umi.services.correction_impl.ipr import iterative_phase_reversal
from umi.services.correction_impl.reciprocity import circular_correlation, estimator_bias, reciprocity_score, scalar_product
from umi.services.correction_impl.svd import aperture_coverage, expected_rank, participation_ratio, svd_baseline
from umi.services.exceptions import ContractError
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.probe import matrix_probe


class TestSvdBaseline:
    def test_rank_one_has_a_single_eigenvalue(self, make_correlation, random_law):
        law = random_law(16)
        result = svd_baseline(make_correlation(np.outer(law, law.conj())))

        assert result.eigenvalues[0] == pytest.approx(16.0)
        assert np.all(np.abs(result.eigenvalues[1:]) < 1e-9)
        assert result.effective_rank == pytest.approx(1.0)
        assert circular_correlation(result.first_vector, law, np.ones(16, dtype=bool)) == pytest.approx(1.0, abs=1e-9)

    def test_participation_ratio(self):
        assert participation_ratio(np.ones(9)) == pytest.approx(9.0)
        assert participation_ratio(np.zeros(4)) == 0.0
        assert expected_rank(3.0, 1.0) == pytest.approx(9.0)

    def test_ipr_covers_both_patches_where_svd_picks_one(self, make_correlation, random_law):
        # Two incoherent patches: the stronger one owns the first eigenvector.
        left, right = np.zeros(16, dtype=np.complex128), np.zeros(16, dtype=np.complex128)
        left[:8] = random_law(8)
        right[8:] = random_law(8)
        correlation = make_correlation(np.outer(left, left.conj()) + 0.7 * np.outer(right, right.conj()))

        ipr = iterative_phase_reversal(correlation)
        first = svd_baseline(correlation).first_vector

        assert aperture_coverage(correlation, ipr.law) >= 0.9
        assert aperture_coverage(correlation, first) <= 0.6


@pytest.fixture
def basis_with_dead_element():
    probe = matrix_probe(4, 4, dead_elements=(2,))
    return CorrectionBasis.transducer(probe, VoxelGrid.regular((-1.0, 1.0), (-1.0, 1.0), [10.0], 0.5))


class TestReciprocity:
    def test_identical_laws_score_zero(self, field_basis, random_law):
        law = random_law(field_basis.size)
        score = reciprocity_score(law, law, field_basis)
        assert score.epsilon == pytest.approx(0.0, abs=1e-12)
        assert score.scalar_product == pytest.approx(1.0)

    def test_scores_ignore_global_phase(self, field_basis, random_law):
        law_in, law_out = random_law(field_basis.size), random_law(field_basis.size)
        reference = reciprocity_score(law_in, law_out, field_basis)
        rotated = reciprocity_score(law_in * np.exp(0.7j), law_out * np.exp(-2.1j), field_basis)
        assert rotated.epsilon == pytest.approx(reference.epsilon)
        assert estimator_bias(law_in * np.exp(1.3j), law_out, field_basis) == pytest.approx(estimator_bias(law_in, law_out, field_basis))

    def test_phase_offset_away_from_the_anchor_counts_in_full(self, field_basis):
        law_in = np.ones(field_basis.size, dtype=np.complex128)
        law_out = np.full(field_basis.size, np.exp(1.0j))
        law_out[field_basis.anchor_index] = 1.0

        score = reciprocity_score(law_in, law_out, field_basis)

        assert score.scalar_product == pytest.approx((1.0 + 15.0 * np.cos(1.0)) / 16.0)
        assert score.epsilon == pytest.approx(0.8619, abs=1e-4)
        assert score.scalar_product < 0.9

    def test_phase_ramp_uses_the_real_part(self, field_basis, random_law):
        law_in = random_law(field_basis.size)
        ramp = 0.8 * field_basis.coordinates[:, 0]
        law_out = law_in * np.exp(1j * ramp)
        expected = np.mean(np.cos(ramp - ramp[field_basis.anchor_index]))

        modulus = 1.0 - estimator_bias(law_out, law_in, field_basis) / 2.0

        assert scalar_product(law_in, law_out, field_basis) == pytest.approx(expected)
        assert expected < modulus - 1e-3

    def test_independent_laws_score_near_two(self, rng):
        probe = matrix_probe(16, 16)
        basis = CorrectionBasis.transducer(probe, VoxelGrid.regular((-1.0, 1.0), (-1.0, 1.0), [10.0], 0.5))
        products = [scalar_product(np.exp(1j * rng.uniform(-np.pi, np.pi, 256)), np.exp(1j * rng.uniform(-np.pi, np.pi, 256)), basis) for _ in range(50)]
        assert np.mean(products) < 0.1
        assert reciprocity_score(np.exp(1j * rng.uniform(-np.pi, np.pi, 256)), np.exp(1j * rng.uniform(-np.pi, np.pi, 256)), basis).epsilon == pytest.approx(2.0, abs=0.3)

    def test_dead_elements_are_excluded(self, basis_with_dead_element, random_law):
        law = random_law(16)
        other = law.copy()
        other[2] = -law[2]
        assert scalar_product(law, other, basis_with_dead_element) == pytest.approx(1.0)
        assert circular_correlation(other, law, basis_with_dead_element.active) == pytest.approx(1.0)

    def test_bias_is_zero_for_the_truth(self, field_basis, random_law):
        truth = random_law(field_basis.size)
        assert estimator_bias(truth * np.exp(0.4j), truth, field_basis) == pytest.approx(0.0, abs=1e-12)

    def test_law_length_must_match(self, field_basis):
        with pytest.raises(ContractError):
            scalar_product(np.ones(3), np.ones(3), field_basis)
