"""UMR1 raw reflection-matrix files.

Layout (little-endian): magic "UMR1"; u32 version; u8 basis kind; u32 N_in,
N_out, N_t; f64 f_s (MHz), f_c (MHz), t0 (µs), c₀ (mm/µs); probe block; for a
plane-wave basis f64 angular pitch, sine step and an angle table of f64
(θ_x, θ_y) pairs; payload complex64 in (i_in, u_out, t) row-major order.
"""

import logging
from pathlib import Path

import numpy as np

from umi.services.artifact_io import FORMAT_VERSION, ArtifactReader, ArtifactWriter
from umi.services.exceptions import ArtifactError, ValidationError
from umi.services.geometry_impl.illumination import BasisKind, IlluminationBasis

from .raw import ReflectionMatrixRaw

logger = logging.getLogger(__name__)

MAGIC = b"UMR1"


def write_basis(writer: ArtifactWriter, basis: IlluminationBasis) -> None:
    if basis.kind == BasisKind.PLANE_WAVE:
        assert basis.angles is not None and basis.angular_pitch is not None and basis.sine_step is not None
        writer.pack("dd", basis.angular_pitch, basis.sine_step)
        writer.array(basis.angles, "f8")


def read_basis(reader: ArtifactReader, kind: int, n_inputs: int) -> IlluminationBasis:
    if kind == BasisKind.TRANSDUCER:
        return IlluminationBasis.transducer()
    if kind != BasisKind.PLANE_WAVE:
        raise ArtifactError("Unknown basis kind.", path=reader.path, details={"kind": kind})
    pitch, step = reader.unpack("dd")
    angles = reader.array(2 * n_inputs, "f8", (n_inputs, 2))
    return IlluminationBasis(kind=BasisKind.PLANE_WAVE, angles=angles, angular_pitch=pitch, sine_step=step)


def write_raw(raw: ReflectionMatrixRaw, path: str | Path) -> Path:
    writer = ArtifactWriter(MAGIC)
    writer.pack("IB", FORMAT_VERSION, int(raw.basis.kind))
    writer.pack("III", *raw.signals.shape)
    writer.pack("dddd", raw.sampling_frequency, raw.demodulation_frequency, raw.time_origin, raw.sound_speed)
    writer.probe(raw.probe)
    write_basis(writer, raw.basis)
    writer.array(raw.signals, "c8")
    return writer.write(path)


def read_raw(path: str | Path) -> ReflectionMatrixRaw:
    reader = ArtifactReader.open(path, MAGIC)
    version, kind = reader.unpack("IB")
    if version != FORMAT_VERSION:
        raise ArtifactError("Unsupported format version.", path=reader.path, details={"version": version})
    n_inputs, n_outputs, n_samples = reader.unpack("III")
    sampling_frequency, demodulation_frequency, time_origin, sound_speed = reader.unpack("dddd")
    probe = reader.probe(demodulation_frequency, sound_speed)
    basis = read_basis(reader, kind, n_inputs)
    reader.check_dimensions(n_inputs, n_outputs, n_samples, itemsize=8)
    signals = reader.array(n_inputs * n_outputs * n_samples, "c8", (n_inputs, n_outputs, n_samples))
    reader.finish()
    try:
        raw = ReflectionMatrixRaw(
            basis=basis,
            probe=probe,
            signals=signals,
            sampling_frequency=sampling_frequency,
            demodulation_frequency=demodulation_frequency,
            time_origin=time_origin,
        )
    except ValidationError as e:
        raise ArtifactError(f"Inconsistent header: {e.message}", path=reader.path, details=e.details) from e
    logger.info(f"Read raw matrix {signals.shape} from {path}.")
    return raw
