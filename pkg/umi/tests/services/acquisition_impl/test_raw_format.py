import struct

import numpy as np
import pytest

from umi.services.acquisition_impl.medium import MediumDescription, PointScatterer
from umi.services.acquisition_impl.raw import ReflectionMatrixRaw
from umi.services.acquisition_impl.raw_format import read_raw, write_raw
from umi.services.acquisition_impl.simulator import simulate
from umi.services.exceptions import ArtifactError, BadMagicError, DimensionOverflowError, TruncatedArtifactError
from umi.services.geometry_impl.illumination import IlluminationBasis, plane_wave_grid
from umi.services.geometry_impl.probe import matrix_probe


@pytest.fixture
def raw(small_probe):
    medium = MediumDescription(scatterers=(PointScatterer(position=(0.0, 0.0, 12.0), reflectivity=0.5 - 0.2j),))
    return simulate(medium, None, small_probe, IlluminationBasis.transducer())


class TestRoundTrip:
    def test_transducer_matrix(self, raw, tmp_path):
        path = write_raw(raw, tmp_path / "point.umr")
        loaded = read_raw(path)

        assert np.array_equal(loaded.signals, raw.signals)
        assert loaded.time_origin == raw.time_origin
        assert loaded.sampling_frequency == raw.sampling_frequency
        assert loaded.probe.aperture == raw.probe.aperture
        assert loaded.probe.bandwidth == raw.probe.bandwidth
        assert np.array_equal(loaded.probe.element_positions, raw.probe.element_positions)

    def test_plane_wave_matrix_with_dead_elements(self, tmp_path):
        probe = matrix_probe(4, 4, dead_elements=(3,), sound_speed=1.4)
        basis = plane_wave_grid(probe)
        medium = MediumDescription(scatterers=(PointScatterer(position=(0.0, 0.0, 10.0)),), sound_speed=1.4)
        original = simulate(medium, None, probe, basis)

        loaded = read_raw(write_raw(original, tmp_path / "pw.umr"))

        assert loaded.is_plane_wave
        assert np.array_equal(loaded.basis.angles, basis.angles)
        assert loaded.basis.sine_step == basis.sine_step
        assert np.array_equal(loaded.probe.element_active, probe.element_active)
        assert loaded.sound_speed == 1.4
        assert np.array_equal(loaded.signals, original.signals)

    def test_empty_time_axis(self, small_probe, tmp_path):
        empty = ReflectionMatrixRaw(
            basis=IlluminationBasis.transducer(),
            probe=small_probe,
            signals=np.zeros((16, 16, 0), dtype=np.complex64),
            sampling_frequency=9.6,
            demodulation_frequency=3.0,
            time_origin=0.0,
        )
        loaded = read_raw(write_raw(empty, tmp_path / "empty.umr"))
        assert loaded.signals.shape == (16, 16, 0)


class TestCorruption:
    def test_bad_magic(self, raw, tmp_path):
        path = write_raw(raw, tmp_path / "m.umr")
        data = bytearray(path.read_bytes())
        data[:4] = b"XXXX"
        path.write_bytes(bytes(data))
        with pytest.raises(BadMagicError, match="bad magic"):
            read_raw(path)

    def test_truncated_payload(self, raw, tmp_path):
        path = write_raw(raw, tmp_path / "t.umr")
        path.write_bytes(path.read_bytes()[:-10])
        with pytest.raises(TruncatedArtifactError):
            read_raw(path)

    def test_truncated_header(self, raw, tmp_path):
        path = write_raw(raw, tmp_path / "h.umr")
        path.write_bytes(path.read_bytes()[:12])
        with pytest.raises(TruncatedArtifactError):
            read_raw(path)

    def test_dimension_overflow(self, raw, tmp_path):
        path = write_raw(raw, tmp_path / "o.umr")
        data = bytearray(path.read_bytes())
        # N_t sits after magic, version, basis kind, N_in and N_out
        data[17:21] = struct.pack("<I", 0xFFFFFFFF)
        path.write_bytes(bytes(data))
        with pytest.raises(DimensionOverflowError):
            read_raw(path)

    def test_trailing_bytes(self, raw, tmp_path):
        path = write_raw(raw, tmp_path / "x.umr")
        path.write_bytes(path.read_bytes() + b"\x00")
        with pytest.raises(ArtifactError, match="Trailing"):
            read_raw(path)
