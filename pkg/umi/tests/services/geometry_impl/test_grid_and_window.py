import numpy as np
import pytest

from umi.services.exceptions import ValidationError
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.probe import matrix_probe
from umi.services.geometry_impl.window import SpatialWindow, count_cells, layout_windows


class TestVoxelGrid:
    def test_regular_snaps_to_pitch(self):
        grid = VoxelGrid.regular((-2.0, 2.0), (-1.0, 1.0), [10.0, 12.0], 0.5)
        assert grid.shape == (2, 5, 9)
        assert grid.n_lateral == 45

    def test_lateral_points_are_row_major(self):
        grid = VoxelGrid.regular((0.0, 1.0), (0.0, 0.5), [5.0], 0.5)
        points = grid.lateral_points()
        assert points[1].tolist() == [0.5, 0.0]
        assert points[3].tolist() == [0.0, 0.5]

    def test_rejects_depth_behind_probe(self):
        with pytest.raises(ValidationError, match="z > 0"):
            VoxelGrid.regular((0.0, 1.0), (0.0, 1.0), [0.0, 1.0], 0.5)

    def test_rejects_irregular_lateral_axis(self):
        with pytest.raises(ValidationError, match="not regular"):
            VoxelGrid(x=np.array([0.0, 0.5, 1.5]), y=np.array([0.0]), z=np.array([1.0]), pitch=0.5)

    def test_planar_grid(self):
        grid = VoxelGrid(x=np.array([0.0]), y=np.arange(4) * 0.5, z=np.array([10.0]), pitch=0.5)
        assert grid.is_planar


class TestSpatialWindow:
    def test_contains_is_strict(self):
        window = SpatialWindow(center=(0.0, 0.0, 20.0), lateral_extent=(4.0, 4.0), axial_extent=2.0)
        assert window.contains(1.9, -1.9, 20.9)
        assert not window.contains(2.0, 0.0, 20.0)

    def test_rejects_empty_extent(self):
        with pytest.raises(ValidationError):
            SpatialWindow(center=(0.0, 0.0, 20.0), lateral_extent=(0.0, 4.0), axial_extent=2.0)

    @pytest.mark.parametrize("extent", [2.0, 4.0, 8.0])
    def test_brute_force_count_matches_formula(self, extent):
        probe = matrix_probe(32, 32)
        window = SpatialWindow(center=(0.0, 0.0, 40.0), lateral_extent=(extent, extent), axial_extent=3.0)
        assert abs(count_cells(window, probe) - window.resolution_cells(probe)) <= 1.0


class TestLayoutWindows:
    def test_tiles_patches_per_slab(self):
        grid = VoxelGrid.regular((-8.0, 8.0), (-8.0, 8.0), np.arange(10.0, 31.0), 0.5)
        windows = layout_windows(grid, patches=2, lateral_width=8.0, axial_width=10.0)
        depths = sorted({w.depth for w in windows})
        assert len(windows) == 4 * len(depths)
        assert depths[0] == pytest.approx(15.0)
        assert depths[-1] == pytest.approx(25.0)

    def test_single_patch_is_centered(self):
        grid = VoxelGrid.regular((-4.0, 4.0), (-4.0, 4.0), [20.0], 0.5)
        [window] = layout_windows(grid, patches=1, lateral_width=8.0, axial_width=3.0)
        assert window.center == (0.0, 0.0, 20.0)

    def test_planar_grid_gets_one_column(self):
        grid = VoxelGrid(x=np.array([0.0]), y=np.arange(-8, 9) * 0.5, z=np.array([20.0]), pitch=0.5)
        windows = layout_windows(grid, patches=2, lateral_width=4.0, axial_width=3.0)
        assert len(windows) == 2

    def test_rejects_bad_overlap(self):
        grid = VoxelGrid.regular((-4.0, 4.0), (-4.0, 4.0), [20.0], 0.5)
        with pytest.raises(ValidationError, match="overlap"):
            layout_windows(grid, patches=1, lateral_width=8.0, axial_width=3.0, overlap=1.0)
