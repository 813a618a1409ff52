import logging

import numpy as np
import pytest

from umi.services.acquisition_impl.medium import MediumDescription, PointScatterer
from umi.services.acquisition_impl.screen import random_screen
from umi.services.acquisition_impl.simulator import simulate
from umi.services.beamformer_impl.beamformer import Beamformer, aliasing_limit, beamform, beamform_confocal
from umi.services.beamformer_impl.config import BeamformConfig
from umi.services.exceptions import ConfigurationError
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.illumination import IlluminationBasis


def _assert_peak_at_target(volume, grid):
    iz, iy, ix = volume.peak_index()
    assert abs(grid.z[iz] - 10.0) <= grid.pitch
    assert abs(grid.y[iy]) <= grid.pitch
    assert abs(grid.x[ix]) <= grid.pitch


class TestBeamform:
    def test_point_target_peaks_on_its_voxel(self, transducer_raw, point_grid):
        focused = beamform(transducer_raw, point_grid, max_offset=1.0)
        _assert_peak_at_target(focused.confocal(), point_grid)

    def test_plane_wave_point_target_peaks_on_its_voxel(self, plane_wave_raw, point_grid):
        focused = beamform(plane_wave_raw, point_grid, max_offset=1.0)
        _assert_peak_at_target(focused.confocal(), point_grid)

    def test_focused_echo_is_real_positive_at_the_target(self, transducer_raw, point_grid):
        focused = beamform(transducer_raw, point_grid, max_offset=0.5)
        peak = focused.diagonal()[1, 6, 6]
        assert abs(peak) > 0
        assert abs(np.angle(peak)) < 1e-3

    def test_transducer_matrix_is_symmetric(self, small_probe, rng):
        medium = MediumDescription(scatterers=tuple(PointScatterer(position=p) for p in [(0.3, -0.2, 14.8), (-0.7, 0.5, 15.2), (1.0, 1.0, 15.0)]))
        screen = random_screen(small_probe, rms=1.0, correlation_length=1.5, rng=rng, depth=2.0)
        raw = simulate(medium, screen, small_probe, IlluminationBasis.transducer())
        grid = VoxelGrid.regular((-2.0, 2.0), (-2.0, 2.0), [15.0], 0.5)
        focused = beamform(raw, grid, max_offset=1.5)

        blocks = focused.blocks.astype(np.complex128)
        asymmetry = np.linalg.norm(blocks - focused.transposed().blocks) / np.linalg.norm(blocks)
        assert asymmetry < 1e-6

    def test_confocal_matches_diagonal(self, plane_wave_raw, point_grid):
        focused = beamform(plane_wave_raw, point_grid, max_offset=1.0)
        volume = beamform_confocal(plane_wave_raw, point_grid)
        assert np.allclose(volume.intensity, focused.confocal().intensity, rtol=1e-5, atol=1e-12 * volume.intensity.max())

    def test_zero_data_gives_zero_volume(self, transducer_raw, point_grid):
        silent = transducer_raw.with_signals(np.zeros_like(transducer_raw.signals))
        volume = beamform_confocal(silent, point_grid)
        assert not np.any(volume.intensity)
        assert np.all(volume.in_db() == -60.0)

    def test_confocal_intensity_is_non_negative(self, plane_wave_raw, point_grid):
        assert np.all(beamform_confocal(plane_wave_raw, point_grid).intensity >= 0)

    def test_warns_when_offset_exceeds_aliasing_limit(self, plane_wave_raw, caplog):
        grid = VoxelGrid.regular((-1.0, 1.0), (-1.0, 1.0), [10.0], 0.5)
        limit = aliasing_limit(plane_wave_raw)
        assert limit == pytest.approx(plane_wave_raw.probe.aperture[1])

        with caplog.at_level(logging.WARNING):
            beamform(plane_wave_raw, grid, max_offset=limit + 0.5)
        assert "aliasing limit" in caplog.text

    def test_aliasing_limit_is_infinite_for_transducer_data(self, transducer_raw):
        assert aliasing_limit(transducer_raw) == float("inf")

    def test_uncovered_voxels_are_zero_and_reported(self, transducer_raw, caplog):
        grid = VoxelGrid.regular((20.0, 21.0), (0.0, 0.0), [5.0], 0.5)
        with caplog.at_level(logging.WARNING):
            focused = beamform(transducer_raw, grid, max_offset=0.5)
        assert "no active element in their directivity cone" in caplog.text
        assert not np.any(focused.blocks)

    def test_unknown_apodization_is_rejected(self):
        with pytest.raises(ConfigurationError, match="Unknown apodization"):
            BeamformConfig(max_offset=1.0, apodization="hann")

    def test_beamformer_records_provenance(self, plane_wave_raw, point_grid):
        focused = Beamformer(BeamformConfig(max_offset=1.0, apodization="none")).beamform(plane_wave_raw, point_grid)
        assert focused.apodization == "none"
        assert focused.input_basis == plane_wave_raw.basis.kind
        assert focused.sound_speed == pytest.approx(1.54)
