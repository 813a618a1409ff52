from unittest.mock import MagicMock

import numpy as np
import pytest

from umi.services.correction_impl.basis import CorrectionBasis
from umi.services.correction_impl.config import CorrectionConfig
from umi.services.correction_impl.ipr import IprResult
from umi.services.correction_impl.multiscale import MultiscaleCorrector, WindowLawEstimator, multiscale_correct
from umi.services.correction_impl.reciprocity import circular_correlation
from umi.services.correction_impl.schedule import parse_schedule
from umi.services.exceptions import ConfigurationError


@pytest.fixture
def flat_estimator():
    estimator = MagicMock(spec=WindowLawEstimator)
    estimator.estimate.return_value = IprResult(law=np.ones(16, dtype=np.complex128), iterations=1, converged=True)
    return estimator


class TestMultiscaleCorrector:
    def test_full_field_correction_recovers_the_screen(self, aberrated_point):
        focused, screen = aberrated_point
        basis = CorrectionBasis.transducer(focused.probe, focused.grid)
        config = CorrectionConfig(epsilon_stop=2.0)

        result = multiscale_correct(focused, parse_schedule("1x1:8@1"), basis, config)

        center = focused.grid.n_lateral // 2
        before = abs(focused.flat_blocks[0, center, focused.center_offset])
        after = abs(result.focused.flat_blocks[0, center, focused.center_offset])
        (estimate,) = result.estimates.windows
        assert after > 1.5 * before
        assert circular_correlation(estimate.law_out, screen.law(focused.probe), basis.active) > 0.8
        assert circular_correlation(result.law_out.at_point((0.0, 0.0, 6.0)), estimate.law_out, basis.active) == pytest.approx(1.0, abs=1e-6)

    def test_flat_estimates_leave_the_matrix_unchanged(self, random_focused, flat_estimator):
        basis = CorrectionBasis.transducer(random_focused.probe, random_focused.grid)
        corrector = MultiscaleCorrector(basis, CorrectionConfig(), estimator=flat_estimator)

        result = corrector.correct(random_focused, parse_schedule("1x1:4,2x2:2@4"))

        assert flat_estimator.estimate.call_count == 2 * (1 + 4)
        assert np.array_equal(result.focused.blocks, random_focused.blocks)
        assert result.estimates.n_steps == 2
        assert all(estimate.scalar_product == pytest.approx(1.0) for estimate in result.estimates.windows)

    def test_observer_sees_every_step(self, random_focused, flat_estimator):
        basis = CorrectionBasis.transducer(random_focused.probe, random_focused.grid)
        observer = MagicMock()

        MultiscaleCorrector(basis, estimator=flat_estimator).correct(random_focused, parse_schedule("1x1:4,2x2:2@4"), observer=observer)

        assert [call.args[0] for call in observer.call_args_list] == [0, 1]

    def test_failing_reciprocity_freezes_the_area(self, random_focused):
        basis = CorrectionBasis.transducer(random_focused.probe, random_focused.grid)
        corrector = MultiscaleCorrector(basis, CorrectionConfig(epsilon_stop=1e-9))

        result = corrector.correct(random_focused, parse_schedule("1x1:4,2x2:2@4"))

        (first,) = result.estimates.windows
        assert first.frozen
        assert result.estimates.for_step(1) == []
        assert np.array_equal(result.focused.blocks, random_focused.blocks)

    def test_direct_correction_runs_only_the_last_step(self, random_focused, flat_estimator):
        basis = CorrectionBasis.transducer(random_focused.probe, random_focused.grid)
        corrector = MultiscaleCorrector(basis, estimator=flat_estimator)

        result = corrector.direct_correct(random_focused, parse_schedule("1x1:4,2x2:2@4"))

        assert result.estimates.n_steps == 1
        assert len(result.estimates.windows) == 4
        assert result.estimates.schedule == "2x2:2@4"


class TestCorrectionConfig:
    def test_defaults_come_from_settings(self, settings):
        settings.UMI_EPSILON_STOP = 0.4
        settings.UMI_IPR_MAX_ITERATIONS = 17
        config = CorrectionConfig()
        assert config.epsilon_stop == 0.4
        assert config.max_iterations == 17
        assert config.min_scalar_product == pytest.approx(0.8)

    @pytest.mark.parametrize("overrides", [{"tolerance": 0.0}, {"max_iterations": 0}, {"epsilon_stop": 3.0}, {"filter_width_factor": -1.0}, {"basis": "spherical"}])
    def test_rejects_invalid_values(self, overrides):
        with pytest.raises(ConfigurationError):
            CorrectionConfig(**overrides)
