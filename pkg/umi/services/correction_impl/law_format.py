"""UMT1 transmission-estimate files.

Layout (little-endian): magic "UMT1"; u32 version; u8 basis kind (0 transducer,
1 Fourier); u32 N_o; u32 N_windows; f64 coordinates[N_o][2]; u8 active[N_o];
u16 length + UTF-8 schedule; then per window: u32 step; f64 x_p, y_p, z_p,
w_x, w_y, w_z; f64 ε, scalar product; u32 iterations in, out; u8 flags
(bit 0 converged, bit 1 frozen); complex64 law_in[N_o], law_out[N_o].
"""

import logging
from pathlib import Path

import numpy as np

from umi.services.artifact_io import FORMAT_VERSION, ArtifactReader, ArtifactWriter
from umi.services.exceptions import ArtifactError, ValidationError
from umi.services.geometry_impl.window import SpatialWindow

from .basis import CorrectionKind
from .estimates import TransmissionEstimate, WindowEstimate

logger = logging.getLogger(__name__)

MAGIC = b"UMT1"
_KINDS = (CorrectionKind.TRANSDUCER, CorrectionKind.FOURIER)


def write_estimates(estimates: TransmissionEstimate, path: str | Path) -> Path:
    size = int(estimates.coordinates.shape[0])
    writer = ArtifactWriter(MAGIC)
    writer.pack("IBII", FORMAT_VERSION, _KINDS.index(estimates.kind), size, len(estimates.windows))
    writer.array(estimates.coordinates, "f8")
    writer.array(estimates.active, "u1")
    schedule = estimates.schedule.encode("utf-8")
    writer.pack("H", len(schedule))
    writer.raw(schedule)
    for e in estimates.windows:
        writer.pack("I", e.step)
        writer.pack("dddddd", *e.window.center, *e.window.lateral_extent, e.window.axial_extent)
        writer.pack("ddIIB", e.epsilon, e.scalar_product, e.iterations_in, e.iterations_out, int(e.converged) | (int(e.frozen) << 1))
        writer.array(e.law_in, "c8")
        writer.array(e.law_out, "c8")
    return writer.write(path)


def read_estimates(path: str | Path) -> TransmissionEstimate:
    reader = ArtifactReader.open(path, MAGIC)
    version, kind, size, count = reader.unpack("IBII")
    if version != FORMAT_VERSION:
        raise ArtifactError("Unsupported format version.", path=reader.path, details={"version": version})
    if kind >= len(_KINDS):
        raise ArtifactError("Unknown correction basis kind.", path=reader.path, details={"kind": kind})
    reader.check_dimensions(size, 2, itemsize=8)
    coordinates = reader.array(size * 2, "f8", (size, 2))
    active = reader.array(size, "u1").astype(bool)
    (length,) = reader.unpack("H")
    schedule = reader.take(length).decode("utf-8", errors="replace")
    reader.check_dimensions(count, 2 * size, itemsize=8)

    windows = []
    for _ in range(count):
        (step,) = reader.unpack("I")
        x, y, z, w_x, w_y, w_z = reader.unpack("dddddd")
        epsilon, product, iterations_in, iterations_out, flags = reader.unpack("ddIIB")
        law_in = reader.array(size, "c8").astype(np.complex128)
        law_out = reader.array(size, "c8").astype(np.complex128)
        try:
            window = SpatialWindow(center=(x, y, z), lateral_extent=(w_x, w_y), axial_extent=w_z)
        except ValidationError as e:
            raise ArtifactError(f"Invalid window record: {e}", path=reader.path) from e
        windows.append(
            WindowEstimate(
                step=step,
                window=window,
                law_in=law_in,
                law_out=law_out,
                epsilon=epsilon,
                scalar_product=product,
                iterations_in=iterations_in,
                iterations_out=iterations_out,
                converged=bool(flags & 1),
                frozen=bool(flags & 2),
            )
        )
    reader.finish()
    logger.info(f"Read {count} window estimates from {path}.")
    return TransmissionEstimate(kind=_KINDS[kind], coordinates=coordinates, active=active, schedule=schedule, windows=tuple(windows))
