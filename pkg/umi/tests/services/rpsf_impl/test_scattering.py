import numpy as np
import pytest

from umi.services.exceptions import ConfigurationError, ContractError
from umi.services.rpsf_impl.config import RpsfConfig
from umi.services.rpsf_impl.scattering import annulus_mask, scattering_rates, split_background


@pytest.fixture
def confocal_with_background(confocal_only, rng):
    """Unit confocal peak plus a symmetric, zero-diagonal background of mean power 1/2."""
    draws = rng.standard_normal((*confocal_only.blocks.shape, 2))
    noise = confocal_only.with_blocks(draws[..., 0] + 1j * draws[..., 1])
    background = (noise.blocks.astype(np.complex128) + noise.transposed().blocks) / 2.0
    k_y, k_x = (s // 2 for s in confocal_only.offset_shape)
    background[..., k_y, k_x] = 0.0
    valid = np.broadcast_to(confocal_only.valid_mask[np.newaxis], background.shape).copy()
    valid[..., k_y, k_x] = False
    background *= np.sqrt(0.5 / np.mean(np.abs(background[valid]) ** 2))
    return confocal_only.with_blocks(confocal_only.blocks + background)


class TestScatteringRates:
    def test_noise_keeps_half_of_its_energy_in_the_symmetric_part(self, random_focused, full_window, near_annulus):
        (rates,) = scattering_rates(random_focused, [full_window], near_annulus)
        assert rates.beta == pytest.approx(0.5, abs=0.05)

    def test_reciprocal_data_is_fully_symmetric(self, random_focused, full_window, near_annulus, symmetrize):
        (rates,) = scattering_rates(symmetrize(random_focused), [full_window], near_annulus)

        assert rates.beta == pytest.approx(1.0, abs=1e-6)
        assert rates.alpha_n == pytest.approx(0.0, abs=1e-6)

    def test_rates_sum_to_one(self, random_focused, confocal_with_background, full_window, near_annulus):
        for focused in (random_focused, confocal_with_background):
            (rates,) = scattering_rates(focused, [full_window], near_annulus)
            assert rates.alpha_s + rates.alpha_m + rates.alpha_n == pytest.approx(1.0, abs=1e-9)
            assert all(0.0 <= alpha <= 1.0 for alpha in (rates.alpha_s, rates.alpha_m, rates.alpha_n))

    def test_symmetric_background_is_counted_as_multiple_scattering(self, confocal_with_background, full_window, near_annulus):
        (rates,) = scattering_rates(confocal_with_background, [full_window], near_annulus)

        assert rates.confocal_intensity == pytest.approx(1.0, rel=1e-6)
        assert rates.alpha_m / rates.alpha_s == pytest.approx(1.0, abs=0.2)
        assert rates.contrast == pytest.approx(1.0, abs=0.2)

    def test_beta_ignores_global_scaling(self, random_focused, full_window, near_annulus):
        (reference,) = scattering_rates(random_focused, [full_window], near_annulus)
        (scaled,) = scattering_rates(random_focused.with_blocks(random_focused.blocks * 3.7), [full_window], near_annulus)
        assert scaled.beta == pytest.approx(reference.beta, rel=1e-6)

    def test_confocal_only_data_is_single_scattering(self, confocal_only, full_window, near_annulus):
        (rates,) = scattering_rates(confocal_only, [full_window], near_annulus)
        assert (rates.alpha_s, rates.alpha_m, rates.alpha_n) == (1.0, 0.0, 0.0)
        assert rates.contrast == float("inf")

    def test_rejects_offsets_shorter_than_the_annulus(self, random_focused, full_window):
        with pytest.raises(ContractError, match="annulus"):
            scattering_rates(random_focused, [full_window], RpsfConfig(annulus_inner_factor=6.0, annulus_outer_factor=10.0))


class TestSplitBackground:
    def test_calibrated_split_maps_pure_noise_to_noise(self):
        assert split_background(1.0, 0.4, 0.5) == pytest.approx((0.6, 0.0, 0.4))

    def test_uncalibrated_split_reads_beta_directly(self):
        assert split_background(1.0, 0.4, 0.5, calibrated=False) == pytest.approx((0.6, 0.2, 0.2))

    def test_background_above_the_peak_saturates(self):
        assert split_background(1.0, 3.0, 1.0) == pytest.approx((0.0, 1.0, 0.0))


class TestAnnulus:
    def test_annulus_stays_inside_the_offset_disc(self, random_focused, near_annulus):
        mask = annulus_mask(random_focused, 13.0, near_annulus)
        radius = np.hypot(random_focused.offsets[:, 0], random_focused.offsets[:, 1])
        assert mask.sum() == 12
        assert radius[mask].min() > 0.0 and radius[mask].max() <= 1.0


class TestRpsfConfig:
    def test_defaults_come_from_settings(self, settings):
        settings.UMI_ANNULUS_INNER_FACTOR = 4.0
        settings.UMI_CALIBRATED_RATES = False
        config = RpsfConfig()
        assert config.annulus_inner_factor == 4.0
        assert config.calibrated is False

    @pytest.mark.parametrize("overrides", [{"annulus_inner_factor": 0.0}, {"annulus_outer_factor": 5.0}, {"min_resolution_cells": 0.0}, {"max_workers": 0}])
    def test_rejects_invalid_values(self, overrides):
        with pytest.raises(ConfigurationError):
            RpsfConfig(**{"annulus_inner_factor": 6.0, "annulus_outer_factor": 10.0, **overrides})
