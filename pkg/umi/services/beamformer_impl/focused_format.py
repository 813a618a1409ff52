"""UMF1 focused-matrix files.

Layout (little-endian): magic "UMF1"; u32 version; u8 input basis kind;
f64 Δρ_max, grid pitch (mm); u32 nx, ny, nz; f64 x[nx], y[ny], z[nz];
f64 f_c (MHz), c₀ (mm/µs); probe block; u16 length + UTF-8 apodization name;
u32 O_y, O_x; payload complex64 blocks (nz, ny, nx, O_y, O_x) row-major.
"""

import logging
from pathlib import Path

from umi.services.artifact_io import FORMAT_VERSION, ArtifactReader, ArtifactWriter
from umi.services.exceptions import ArtifactError, ServiceError
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.illumination import BasisKind

from .focused import FocusedRMatrix

logger = logging.getLogger(__name__)

MAGIC = b"UMF1"


def write_focused(focused: FocusedRMatrix, path: str | Path) -> Path:
    grid = focused.grid
    writer = ArtifactWriter(MAGIC)
    writer.pack("IB", FORMAT_VERSION, int(focused.input_basis))
    writer.pack("dd", focused.max_offset, grid.pitch)
    writer.pack("III", grid.nx, grid.ny, grid.nz)
    writer.array(grid.x, "f8")
    writer.array(grid.y, "f8")
    writer.array(grid.z, "f8")
    writer.pack("dd", focused.probe.center_frequency, focused.sound_speed)
    writer.probe(focused.probe)
    name = focused.apodization.encode("utf-8")
    writer.pack("H", len(name))
    writer.raw(name)
    writer.pack("II", *focused.offset_shape)
    writer.array(focused.blocks, "c8")
    return writer.write(path)


def read_focused(path: str | Path) -> FocusedRMatrix:
    reader = ArtifactReader.open(path, MAGIC)
    version, kind = reader.unpack("IB")
    if version != FORMAT_VERSION:
        raise ArtifactError("Unsupported format version.", path=reader.path, details={"version": version})
    max_offset, pitch = reader.unpack("dd")
    nx, ny, nz = reader.unpack("III")
    x = reader.array(nx, "f8")
    y = reader.array(ny, "f8")
    z = reader.array(nz, "f8")
    center_frequency, sound_speed = reader.unpack("dd")
    probe = reader.probe(center_frequency, sound_speed)
    (name_length,) = reader.unpack("H")
    apodization = reader.take(name_length).decode("utf-8", errors="replace")
    offsets_y, offsets_x = reader.unpack("II")
    reader.check_dimensions(nz, ny, nx, offsets_y, offsets_x, itemsize=8)
    blocks = reader.array(nz * ny * nx * offsets_y * offsets_x, "c8", (nz, ny, nx, offsets_y, offsets_x))
    reader.finish()
    try:
        grid = VoxelGrid(x=x, y=y, z=z, pitch=pitch)
        focused = FocusedRMatrix(
            grid=grid,
            max_offset=max_offset,
            blocks=blocks,
            probe=probe.with_sound_speed(sound_speed),
            input_basis=BasisKind(kind),
            apodization=apodization,
            sound_speed=sound_speed,
        )
    except (ServiceError, ValueError) as e:
        raise ArtifactError(f"Inconsistent focused-matrix header: {e}", path=reader.path) from e
    logger.info(f"Read focused matrix {blocks.shape} from {path}.")
    return focused
