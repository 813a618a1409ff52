"""UMS1 RPSF map files and the tab-separated metric table.

Layout (little-endian): magic "UMS1"; u32 version; u32 K, O_y, O_x; f64 pitch
(mm); per window f64 x_p, y_p, z_p, w_x, w_y, w_z; payload f64 maps
(K, O_y, O_x) row-major.
"""

import logging
from pathlib import Path

import pandas as pd

from umi.services.artifact_io import FORMAT_VERSION, ArtifactReader, ArtifactWriter
from umi.services.exceptions import ArtifactError, ServiceError
from umi.services.geometry_impl.window import SpatialWindow

from .stack import RpsfStack

logger = logging.getLogger(__name__)

MAGIC = b"UMS1"


def write_rpsf(stack: RpsfStack, path: str | Path) -> Path:
    writer = ArtifactWriter(MAGIC)
    writer.pack("IIII", FORMAT_VERSION, len(stack.windows), *stack.offset_shape)
    writer.pack("d", stack.pitch)
    for window in stack.windows:
        writer.pack("dddddd", *window.center, *window.lateral_extent, window.axial_extent)
    writer.array(stack.maps, "f8")
    return writer.write(path)


def read_rpsf(path: str | Path) -> RpsfStack:
    reader = ArtifactReader.open(path, MAGIC)
    version, count, offsets_y, offsets_x = reader.unpack("IIII")
    if version != FORMAT_VERSION:
        raise ArtifactError("Unsupported format version.", path=reader.path, details={"version": version})
    (pitch,) = reader.unpack("d")
    reader.check_dimensions(count, 6, itemsize=8)
    records = [reader.unpack("dddddd") for _ in range(count)]
    reader.check_dimensions(count, offsets_y, offsets_x, itemsize=8)
    maps = reader.array(count * offsets_y * offsets_x, "f8", (count, offsets_y, offsets_x))
    reader.finish()
    try:
        windows = tuple(SpatialWindow(center=(x, y, z), lateral_extent=(w_x, w_y), axial_extent=w_z) for x, y, z, w_x, w_y, w_z in records)
        stack = RpsfStack(windows=windows, maps=maps, pitch=pitch)
    except ServiceError as e:
        raise ArtifactError(f"Inconsistent RPSF file: {e}", path=reader.path) from e
    logger.info(f"Read {count} RPSF maps from {path}.")
    return stack


def write_metrics(stack: RpsfStack, path: str | Path) -> Path:
    """One row per window; unresolved widths and missing coherence factors are left empty."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    stack.to_frame().to_csv(target, sep="\t", index=False, float_format="%.6g")
    logger.info(f"Wrote {len(stack.windows)} metric rows to {target}.")
    return target


def read_metrics(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path, sep="\t")
