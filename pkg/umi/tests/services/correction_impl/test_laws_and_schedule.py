import numpy as np
import pytest

from umi.services.correction_impl.laws import LawField
from umi.services.correction_impl.schedule import PRESETS, Schedule, ScheduleStep, parse_schedule
from umi.services.exceptions import ConfigurationError, ContractError, ValidationError
from umi.services.geometry_impl.window import SpatialWindow


class TestLawField:
    def test_flat_field_is_all_ones(self, field_basis):
        field = LawField.flat(field_basis)
        assert field.is_flat
        assert np.array_equal(field.at(1), np.ones((field_basis.grid.n_lateral, field_basis.size)))

    def test_uniform_law_applies_everywhere(self, field_basis, random_law):
        law = random_law(field_basis.size)
        field = LawField.uniform(field_basis, law)
        assert np.allclose(field.at(0), law[np.newaxis, :])
        assert np.allclose(field.conjugate().at(1), np.conj(law)[np.newaxis, :])

    def test_uniform_rejects_non_unit_laws(self, field_basis):
        with pytest.raises(ValidationError):
            LawField.uniform(field_basis, 2.0 * np.ones(field_basis.size))

    def test_blend_is_exact_at_window_centers_and_smooth_between(self, field_basis, random_law):
        grid = field_basis.grid
        left = SpatialWindow((-1.0, 0.0, 10.0), (2.0, 4.0), 10.0)
        right = SpatialWindow((0.0, 0.0, 10.0), (2.0, 4.0), 10.0)
        law_a, law_b = field_basis.anchor(random_law(field_basis.size)), field_basis.anchor(random_law(field_basis.size))

        field = LawField.blend(field_basis, [left, right], [law_a, law_b])
        laws = field.at(0)

        def index(x: float, y: float) -> int:
            return int(np.argmin(np.abs(grid.y - y))) * grid.nx + int(np.argmin(np.abs(grid.x - x)))

        assert np.allclose(laws[index(-1.0, 0.0)], law_a)
        assert np.allclose(laws[index(0.0, 0.0)], law_b)
        midpoint = (law_a + law_b) / np.abs(law_a + law_b)
        assert np.allclose(laws[index(-0.5, 0.0)], midpoint)
        # x = 2 lies outside both tents and takes the nearest window
        assert np.allclose(laws[index(2.0, 0.0)], law_b)

    def test_compose_multiplies_layers(self, field_basis, random_law):
        first, second = random_law(field_basis.size), random_law(field_basis.size)
        field = LawField.uniform(field_basis, first).compose(LawField.uniform(field_basis, second))
        assert np.allclose(field.at(0), (first * second)[np.newaxis, :])
        assert np.allclose(field.compose(field.conjugate()).at(1), 1.0)

    def test_blend_needs_one_law_per_window(self, field_basis):
        with pytest.raises(ContractError):
            LawField.blend(field_basis, [SpatialWindow((0.0, 0.0, 10.0), (2.0, 2.0), 2.0)], [])


class TestSchedule:
    def test_parses_steps_and_shared_axial_width(self):
        schedule = parse_schedule("1x1:16, 2x2:12, 4x4:8@3")
        assert [step.patches for step in schedule.steps] == [1, 2, 4]
        assert [step.lateral_width for step in schedule.steps] == [16.0, 12.0, 8.0]
        assert all(step.axial_width == 3.0 for step in schedule.steps)
        assert str(schedule) == "1x1:16,2x2:12,4x4:8@3"

    def test_presets_and_scaling(self):
        assert len(PRESETS["head-phantom"].steps) == 6
        assert PRESETS["head-phantom"].steps[0].axial_width == 5.5
        scaled = parse_schedule("pork-chop", scale=0.5)
        assert [step.lateral_width for step in scaled.steps] == [8.0, 6.0, 4.0]
        assert scaled.steps[0].axial_width == 3.0

    @pytest.mark.parametrize("text", ["2x3:8", "big", "1x1:16@deep"])
    def test_rejects_malformed_text(self, text):
        with pytest.raises(ConfigurationError):
            parse_schedule(text)

    @pytest.mark.parametrize("text", ["", "2x2:8,1x1:16", "1x1:8,2x2:12"])
    def test_rejects_degenerate_schedules(self, text):
        with pytest.raises(ContractError, match="Degenerate schedule"):
            parse_schedule(text)

    def test_rejects_non_positive_widths(self):
        with pytest.raises(ContractError):
            Schedule(name="bad", steps=(ScheduleStep(1, 0.0, 3.0),))

    def test_windows_tile_the_grid(self, field_basis):
        grid = field_basis.grid
        layouts = parse_schedule("1x1:4,2x2:2@4").windows(grid)
        assert [len(windows) for windows in layouts] == [1, 4]
        assert layouts[1][0].lateral_extent == (2.0, 2.0)
