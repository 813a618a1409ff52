import numpy as np
import pytest

from umi.services.acquisition_impl.medium import MediumDescription, PointScatterer
from umi.services.acquisition_impl.screen import flat_screen, random_screen
from umi.services.acquisition_impl.simulator import inject_raw_background, simulate, synthesize_plane_waves
from umi.services.exceptions import AcquisitionError, ContractError
from umi.services.geometry_impl.illumination import BasisKind, IlluminationBasis
from umi.services.geometry_impl.probe import matrix_probe


def _points(*positions):
    return MediumDescription(scatterers=tuple(PointScatterer(position=p) for p in positions))


class TestSimulate:
    def test_on_axis_echo_arrives_at_round_trip_time(self, tiny_probe):
        raw = simulate(_points((0.0, 0.0, 30.0)), None, tiny_probe, IlluminationBasis.transducer())
        center = tiny_probe.center_index
        trace = np.abs(raw.signals[center, center])
        arrival = raw.times()[np.argmax(trace)]
        assert arrival == pytest.approx(2 * 30.0 / 1.54, abs=raw.sampling_interval)

    def test_flat_screen_is_identity(self, small_probe):
        medium = _points((0.5, -0.5, 20.0), (-1.0, 0.0, 25.0))
        basis = IlluminationBasis.transducer()
        plain = simulate(medium, None, small_probe, basis)
        screened = simulate(medium, flat_screen(small_probe), small_probe, basis)
        assert np.array_equal(plain.signals, screened.signals)

    def test_transducer_basis_is_reciprocal(self, small_probe, rng):
        medium = _points((0.3, 0.2, 15.0), (-0.8, 0.4, 22.0), (0.0, -1.0, 18.0))
        screen = random_screen(small_probe, rms=1.0, correlation_length=1.5, rng=rng, depth=2.0)
        raw = simulate(medium, screen, small_probe, IlluminationBasis.transducer())
        assert np.array_equal(raw.signals, raw.signals.transpose(1, 0, 2))

    def test_linear_in_scatterers(self, small_probe):
        basis = IlluminationBasis.transducer()
        first = _points((0.0, 0.0, 20.0), (0.0, 0.0, 40.0))
        second = _points((0.5, 0.5, 30.0))
        combined = simulate(first.merged(second), None, small_probe, basis)
        a = simulate(first, None, small_probe, basis)
        b = simulate(second, None, small_probe, basis)

        offset = int(round((b.time_origin - a.time_origin) / a.sampling_interval))
        expected = a.signals.astype(np.complex128)
        expected[:, :, offset : offset + b.n_samples] += b.signals
        assert combined.n_samples == a.n_samples
        assert np.allclose(combined.signals, expected, atol=1e-5 * np.abs(expected).max())

    def test_plane_waves_match_delayed_transducer_data(self, small_probe):
        medium = _points((0.2, 0.1, 12.0), (-0.5, 0.4, 16.0))
        basis = IlluminationBasis(kind=BasisKind.PLANE_WAVE, angles=np.array([[0.0, 0.0], [0.1, -0.05], [-0.2, 0.1]]), angular_pitch=0.1, sine_step=0.1)
        plane = simulate(medium, None, small_probe, basis)
        canonical = simulate(medium, None, small_probe, IlluminationBasis.transducer())

        synthesized = synthesize_plane_waves(canonical, basis, plane.time_origin, plane.n_samples)
        error = np.linalg.norm(synthesized.signals - plane.signals) / np.linalg.norm(plane.signals)
        assert error < 1e-3

    def test_noise_power_is_relative_to_signal(self, small_probe):
        medium = _points((0.0, 0.0, 10.0), (0.5, 0.5, 14.0))
        basis = IlluminationBasis.transducer()
        clean = simulate(medium, None, small_probe, basis, rng=np.random.default_rng(7))
        noisy = simulate(medium, None, small_probe, basis, noise_power=0.1, rng=np.random.default_rng(7))
        noise = noisy.signals.astype(np.complex128) - clean.signals
        ratio = np.mean(np.abs(noise) ** 2) / np.mean(np.abs(clean.signals.astype(np.complex128)) ** 2)
        assert ratio == pytest.approx(0.1, rel=0.05)

    def test_dead_elements_are_silent(self):
        probe = matrix_probe(3, 3, dead_elements=(2,))
        raw = simulate(_points((0.0, 0.0, 20.0)), None, probe, IlluminationBasis.transducer())
        assert not np.any(raw.signals[2])
        assert not np.any(raw.signals[:, 2])
        assert np.any(raw.signals[4, 4])

    @pytest.mark.parametrize("depth", [0.0, -5.0])
    def test_rejects_scatterer_behind_probe(self, tiny_probe, depth):
        with pytest.raises(AcquisitionError, match="behind the probe"):
            simulate(_points((0.0, 0.0, depth)), None, tiny_probe, IlluminationBasis.transducer())

    def test_rejects_empty_medium(self, tiny_probe):
        with pytest.raises(AcquisitionError, match="no scatterer"):
            simulate(MediumDescription(), None, tiny_probe, IlluminationBasis.transducer())


class TestRawBackground:
    def test_background_is_symmetric_at_requested_power(self, small_probe, rng):
        raw = simulate(_points((0.0, 0.0, 15.0)), None, small_probe, IlluminationBasis.transducer())
        noisy = inject_raw_background(raw, power=0.5, rng=rng)
        background = noisy.signals.astype(np.complex128) - raw.signals
        assert np.allclose(background, background.transpose(1, 0, 2), atol=1e-6)
        ratio = np.mean(np.abs(background) ** 2) / np.mean(np.abs(raw.signals.astype(np.complex128)) ** 2)
        assert ratio == pytest.approx(0.5, rel=0.01)

    def test_plane_wave_data_is_refused(self, small_probe, rng):
        basis = IlluminationBasis(kind=BasisKind.PLANE_WAVE, angles=np.zeros((1, 2)), angular_pitch=0.1, sine_step=0.1)
        raw = simulate(_points((0.0, 0.0, 15.0)), None, small_probe, basis)
        with pytest.raises(ContractError):
            inject_raw_background(raw, power=0.5, rng=rng)
