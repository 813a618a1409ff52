import numpy as np
import pytest

from umi.services.correction_impl.basis import CorrectionKind
from umi.services.correction_impl.estimates import TransmissionEstimate, WindowEstimate
from umi.services.correction_impl.isoplanatic import isoplanatic_curve, law_correlation
from umi.services.correction_impl.law_format import read_estimates, write_estimates
from umi.services.exceptions import ArtifactError, BadMagicError
from umi.services.geometry_impl.window import SpatialWindow


@pytest.fixture
def estimates(random_law):
    def _window(step: int, x: float, law: np.ndarray, frozen: bool = False) -> WindowEstimate:
        return WindowEstimate(
            step=step,
            window=SpatialWindow((x, 0.0, 20.0), (4.0, 4.0), 3.0),
            law_in=law.astype(np.complex64).astype(np.complex128),
            law_out=law.astype(np.complex64).astype(np.complex128),
            epsilon=0.05,
            scalar_product=0.975,
            iterations_in=3,
            iterations_out=4,
            converged=True,
            frozen=frozen,
        )

    shared = random_law(9)
    windows = (_window(0, 0.0, shared), _window(1, -2.0, shared), _window(1, 2.0, shared), _window(1, 7.0, random_law(9)), _window(1, 9.0, shared, frozen=True))
    return TransmissionEstimate(
        kind=CorrectionKind.TRANSDUCER,
        coordinates=np.column_stack([np.repeat([-0.5, 0.0, 0.5], 3), np.tile([-0.5, 0.0, 0.5], 3)]),
        active=np.array([True] * 8 + [False]),
        schedule="1x1:8,2x2:4@3",
        windows=windows,
    )


class TestTransmissionEstimateFormat:
    def test_round_trip(self, estimates, tmp_path):
        loaded = read_estimates(write_estimates(estimates, tmp_path / "laws.umt"))

        assert loaded.kind == CorrectionKind.TRANSDUCER
        assert loaded.schedule == estimates.schedule
        assert np.array_equal(loaded.active, estimates.active)
        assert np.array_equal(loaded.coordinates, estimates.coordinates)
        for original, copy in zip(estimates.windows, loaded.windows):
            assert copy.window == original.window
            assert np.array_equal(copy.law_out, original.law_out)
            assert (copy.step, copy.iterations_in, copy.iterations_out, copy.frozen) == (original.step, 3, 4, original.frozen)
            assert copy.epsilon == original.epsilon

    def test_rejects_other_magic(self, estimates, tmp_path):
        path = write_estimates(estimates, tmp_path / "laws.umt")
        path.write_bytes(b"UMF1" + path.read_bytes()[4:])
        with pytest.raises(BadMagicError):
            read_estimates(path)

    def test_rejects_trailing_bytes(self, estimates, tmp_path):
        path = write_estimates(estimates, tmp_path / "laws.umt")
        path.write_bytes(path.read_bytes() + b"\x00")
        with pytest.raises(ArtifactError, match="Trailing"):
            read_estimates(path)

    def test_frame_lists_every_window(self, estimates):
        frame = estimates.to_frame()
        assert len(frame) == 5
        assert frame["frozen"].sum() == 1
        assert estimates.median_scalar_product(step=1) == pytest.approx(0.975)


class TestIsoplanaticAnalysis:
    def test_identical_laws_correlate_fully(self, estimates):
        pairs = law_correlation(estimates, step=1)
        # three live windows give three pairs; the frozen one is left out
        assert len(pairs) == 3
        assert list(pairs["separation"]) == sorted(pairs["separation"])
        assert pairs.loc[pairs["separation"] == 4.0, "correlation"].iloc[0] == pytest.approx(1.0, abs=1e-6)

    def test_curve_bins_pairs(self, estimates):
        curve = isoplanatic_curve(estimates, step=1, bin_width=5.0)
        assert curve["pairs"].sum() == 3
        assert curve.loc[0, "correlation"] == pytest.approx(1.0, abs=1e-6)

    def test_empty_step_gives_empty_curve(self, estimates):
        assert isoplanatic_curve(estimates, step=0, bin_width=1.0).empty
