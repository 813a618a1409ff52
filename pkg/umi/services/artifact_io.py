"""Little-endian binary helpers shared by the UMR1, UMF1, UMT1 and UMS1 artifact formats.

Files are assembled in memory and written in one call, and readers parse a
complete byte string, so a failing read never leaves a partial object behind.
"""

import logging
import struct
from pathlib import Path
from typing import Any

import numpy as np

from umi.services.exceptions import ArtifactError, BadMagicError, DimensionOverflowError, TruncatedArtifactError, ValidationError
from umi.services.geometry_impl.probe import ProbeModel

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
# Largest payload a reader accepts before allocating (16 GiB).
MAX_PAYLOAD_BYTES = 1 << 34


class ArtifactWriter:
    def __init__(self, magic: bytes) -> None:
        self._parts: list[bytes] = [magic]

    def pack(self, fmt: str, *values: Any) -> None:
        self._parts.append(struct.pack("<" + fmt, *values))

    def array(self, values: np.ndarray, dtype: str) -> None:
        self._parts.append(np.ascontiguousarray(values, dtype=np.dtype(dtype).newbyteorder("<")).tobytes())

    def probe(self, probe: ProbeModel) -> None:
        """Probe block: u32 N_elem; f64 pitch, f_low, f_high, θ_max; per element f64 u_x, u_y + u8 active."""
        self.pack("I", probe.n_elements)
        self.pack("dddd", probe.pitch, probe.bandwidth[0], probe.bandwidth[1], probe.directivity_limit)
        records = np.zeros(probe.n_elements, dtype=np.dtype([("x", "<f8"), ("y", "<f8"), ("active", "u1")]))
        records["x"] = probe.element_positions[:, 0]
        records["y"] = probe.element_positions[:, 1]
        records["active"] = probe.element_active
        self._parts.append(records.tobytes())

    def raw(self, data: bytes) -> None:
        self._parts.append(bytes(data))

    def getvalue(self) -> bytes:
        return b"".join(self._parts)

    def write(self, path: str | Path) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        payload = self.getvalue()
        target.write_bytes(payload)
        logger.info(f"Wrote {len(payload)} bytes to {target}.")
        return target


class ArtifactReader:
    def __init__(self, data: bytes, magic: bytes, path: str | None = None) -> None:
        self.path = path
        self._data = data
        self._offset = 0
        found = self.take(len(magic))
        if found != magic:
            raise BadMagicError(path=path, expected=magic, found=found)

    @classmethod
    def open(cls, path: str | Path, magic: bytes) -> "ArtifactReader":
        return cls(Path(path).read_bytes(), magic, path=str(path))

    def take(self, size: int) -> bytes:
        if size > len(self._data) - self._offset:
            raise TruncatedArtifactError("Artifact ends before the expected data.", path=self.path, details={"offset": self._offset, "needed": size})
        chunk = self._data[self._offset : self._offset + size]
        self._offset += size
        return chunk

    def unpack(self, fmt: str) -> tuple[Any, ...]:
        return struct.unpack("<" + fmt, self.take(struct.calcsize("<" + fmt)))

    def array(self, count: int, dtype: str, shape: tuple[int, ...] | None = None) -> np.ndarray:
        item = np.dtype(dtype).newbyteorder("<")
        size = count * item.itemsize
        if size > MAX_PAYLOAD_BYTES:
            raise DimensionOverflowError("Header dimensions exceed the payload limit.", path=self.path, details={"bytes": size})
        values = np.frombuffer(self.take(size), dtype=item).astype(np.dtype(dtype).newbyteorder("="))
        return values.reshape(shape) if shape is not None else values

    def probe(self, center_frequency: float, sound_speed: float) -> ProbeModel:
        (n_elements,) = self.unpack("I")
        pitch, low, high, directivity = self.unpack("dddd")
        record = np.dtype([("x", "<f8"), ("y", "<f8"), ("active", "u1")])
        if n_elements * record.itemsize > MAX_PAYLOAD_BYTES:
            raise DimensionOverflowError("Probe block is too large.", path=self.path, details={"n_elements": n_elements})
        records = np.frombuffer(self.take(n_elements * record.itemsize), dtype=record)
        positions = np.column_stack([records["x"], records["y"]]).astype(np.float64)
        aperture = (float(np.ptp(positions[:, 0]) + pitch), float(np.ptp(positions[:, 1]) + pitch)) if n_elements else (pitch, pitch)
        try:
            return ProbeModel(
                element_positions=positions,
                element_active=records["active"].astype(bool),
                pitch=pitch,
                aperture=aperture,
                center_frequency=center_frequency,
                bandwidth=(low, high),
                directivity_limit=directivity,
                sound_speed=sound_speed,
            )
        except ValidationError as e:
            raise ArtifactError(f"Probe block is inconsistent: {e.message}", path=self.path) from e

    def check_dimensions(self, *dims: int, itemsize: int = 8) -> None:
        total = itemsize
        for dim in dims:
            total *= dim
        if total > MAX_PAYLOAD_BYTES:
            raise DimensionOverflowError("Header dimensions exceed the payload limit.", path=self.path, details={"dims": dims})
        if total > len(self._data) - self._offset:
            raise TruncatedArtifactError("Payload is shorter than the header dimensions.", path=self.path, details={"dims": dims})

    def finish(self) -> None:
        if self._offset != len(self._data):
            raise ArtifactError("Trailing bytes after the payload.", path=self.path, details={"extra": len(self._data) - self._offset})
