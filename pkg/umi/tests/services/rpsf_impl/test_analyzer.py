import logging

import numpy as np
import pytest

from umi.services.correction_impl.basis import CorrectionBasis
from umi.services.exceptions import ContractError
from umi.services.geometry_impl.window import SpatialWindow
from umi.services.rpsf_impl.analyzer import RpsfAnalyzer
from umi.services.rpsf_impl.stack import METRIC_COLUMNS


@pytest.fixture
def halves():
    return [SpatialWindow(center=(-1.25, 0.0, 13.0), lateral_extent=(5.0, 10.0), axial_extent=4.0), SpatialWindow(center=(1.25, 0.0, 13.0), lateral_extent=(5.0, 10.0), axial_extent=4.0)]


class TestRpsfAnalyzer:
    def test_collects_metrics_for_every_window(self, confocal_only, halves, near_annulus):
        basis = CorrectionBasis.transducer(confocal_only.probe, confocal_only.grid)

        stack = RpsfAnalyzer(near_annulus, basis).analyze(confocal_only, halves)

        assert len(stack.metrics) == 2
        for metric in stack.metrics:
            assert metric.resolution == pytest.approx(np.sqrt(0.25 / np.pi))
            assert metric.alpha_s == 1.0
            assert 0.0 <= metric.coherence <= 1.0
        assert list(stack.to_frame().columns) == METRIC_COLUMNS

    def test_coherence_is_skipped_without_a_basis(self, confocal_only, halves, near_annulus):
        stack = RpsfAnalyzer(near_annulus).analyze(confocal_only, halves)
        assert all(metric.coherence is None for metric in stack.metrics)

    def test_warns_about_unresolved_windows(self, random_focused, halves, near_annulus, caplog):
        with caplog.at_level(logging.WARNING, logger="umi.services.rpsf_impl.analyzer"):
            stack = RpsfAnalyzer(near_annulus).analyze(random_focused, halves)

        assert [metric.resolution for metric in stack.metrics] == [None, None]
        assert "2 of 2 windows have no resolvable RPSF peak" in caplog.text

    def test_needs_one_law_per_window(self, confocal_only, halves, near_annulus):
        basis = CorrectionBasis.transducer(confocal_only.probe, confocal_only.grid)
        with pytest.raises(ContractError):
            RpsfAnalyzer(near_annulus, basis).analyze(confocal_only, halves, laws_in=[np.ones(basis.size)])
