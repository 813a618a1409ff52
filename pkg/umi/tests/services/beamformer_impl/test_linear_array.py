import logging

import numpy as np
import pytest

from umi.services.acquisition_impl.medium import MediumDescription, PointScatterer
from umi.services.acquisition_impl.simulator import simulate
from umi.services.beamformer_impl.linear_array import emulate_linear_array
from umi.services.exceptions import ContractError
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.illumination import plane_wave_grid


def _plane(x_focus: float = 0.0) -> VoxelGrid:
    return VoxelGrid(x=np.array([x_focus]), y=np.arange(-3.0, 3.01, 0.5), z=np.array([9.5, 10.0, 10.5]), pitch=0.5)


class TestEmulateLinearArray:
    def test_target_on_the_focus_line_peaks_on_its_voxel(self, small_probe):
        medium = MediumDescription(scatterers=(PointScatterer(position=(0.0, 1.0, 10.0)),))
        raw = simulate(medium, None, small_probe, plane_wave_grid(small_probe))
        grid = _plane()

        focused = emulate_linear_array(raw, (0.0, 10.0), grid, max_offset=1.0)
        iz, iy, _ = focused.confocal().peak_index()

        assert focused.grid.is_planar
        assert focused.offset_shape[1] == 1
        assert focused.apodization == "cylindrical"
        assert abs(grid.y[iy] - 1.0) <= grid.pitch
        assert abs(grid.z[iz] - 10.0) <= grid.pitch

    def test_requires_plane_wave_data(self, transducer_raw):
        with pytest.raises(ContractError, match="plane-wave"):
            emulate_linear_array(transducer_raw, (0.0, 10.0), _plane(), max_offset=1.0)

    def test_grid_must_sit_on_the_focus_line(self, plane_wave_raw):
        with pytest.raises(ContractError, match="x = x_f"):
            emulate_linear_array(plane_wave_raw, (0.5, 10.0), _plane(0.0), max_offset=1.0)

    def test_warns_when_focus_line_leaves_the_aperture(self, plane_wave_raw, caplog):
        with caplog.at_level(logging.WARNING):
            emulate_linear_array(plane_wave_raw, (4.0, 10.0), _plane(4.0), max_offset=0.5)
        assert "outside the aperture" in caplog.text
