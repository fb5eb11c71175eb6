"""Little-endian binary container shared by the evfuse tensor formats.

Every format starts with a four byte magic and a ``u32`` version, followed
by format specific ``u32``/``u8`` header fields and ``f32`` payloads. The
helpers here only know about those primitives; the per-format layouts live
next to the types they serialize.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from evfuse.errors import FormatError

FORMAT_VERSION = 1

_U32 = np.dtype("<u4")
_F32 = np.dtype("<f4")


def pack_header(magic: bytes, *fields: int) -> bytes:
    """Return the magic, the format version and ``fields`` as ``u32``.

    Args:
        magic: Four byte format identifier.
        fields: Header values written after the version.

    Returns:
        Encoded header bytes.
    """

    if len(magic) != 4:
        raise ValueError(f"Magic must have 4 bytes, got {magic!r}")
    # Range check in int64 before narrowing to u32.
    values = np.asarray((FORMAT_VERSION, *fields), dtype=np.int64)
    if values.size and (values.min() < 0 or values.max() > 0xFFFFFFFF):
        raise ValueError(f"Header fields do not fit in u32: {fields}")
    return magic + values.astype(_U32).tobytes()


def pack_u32(*fields: int) -> bytes:
    """Encode ``fields`` as consecutive little-endian ``u32`` values.

    Args:
        fields: Values to encode.

    Returns:
        Encoded bytes.
    """

    return np.asarray(fields, dtype=np.int64).astype(_U32).tobytes()


def pack_f32(values: np.ndarray) -> bytes:
    """Encode an array as little-endian ``f32`` in C order.

    Args:
        values: Array of any shape.

    Returns:
        Encoded bytes.
    """

    return np.ascontiguousarray(values, dtype=_F32).tobytes()


class TensorReader:
    """Sequential reader over the bytes of one binary tensor file.

    Attributes:
        data: Raw file content.
        offset: Position of the next unread byte.
    """

    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    @classmethod
    def open(cls, path: Path, magic: bytes) -> "TensorReader":
        """Read ``path`` and validate its magic and version.

        Args:
            path: File to read.
            magic: Expected four byte identifier.

        Returns:
            Reader positioned after the version field.

        Throws:
            FormatError: If the magic or the version do not match.
        """

        reader = cls(path.read_bytes())
        reader.expect_magic(magic)
        return reader

    def _take(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise FormatError(
                f"Truncated file: need {size} bytes at offset {self.offset}"
            )
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def expect_magic(self, magic: bytes) -> None:
        """Consume the magic and the version field.

        Args:
            magic: Expected four byte identifier.

        Throws:
            FormatError: If the magic or the version do not match.
        """

        found = self._take(4)
        if found != magic:
            raise FormatError(f"Bad magic {found!r}, expected {magic!r}")
        (version,) = self.u32(1)
        if version != FORMAT_VERSION:
            raise FormatError(
                f"Unsupported {magic.decode()} version {version}"
            )

    def u32(self, count: int) -> tuple[int, ...]:
        """Consume ``count`` unsigned 32 bit integers.

        Args:
            count: Number of values to read.

        Returns:
            The decoded values.
        """

        raw = np.frombuffer(self._take(4 * count), dtype=_U32)
        return tuple(int(v) for v in raw)

    def u8(self) -> int:
        """Consume one unsigned byte.

        Returns:
            The decoded value.
        """

        return self._take(1)[0]

    def f32(self, shape: tuple[int, ...]) -> np.ndarray:
        """Consume an ``f32`` array and widen it to ``float64``.

        Args:
            shape: Shape of the stored array in C order.

        Returns:
            Array of the requested shape.
        """

        # An empty shape tuple reads a single scalar.
        count = int(np.prod(shape, dtype=np.int64))
        raw = np.frombuffer(self._take(4 * count), dtype=_F32)
        return raw.astype(np.float64).reshape(shape)

    def finish(self) -> None:
        """Check that the whole file was consumed.

        Throws:
            FormatError: If trailing bytes remain.
        """

        if self.offset != len(self.data):
            raise FormatError(
                f"{len(self.data) - self.offset} trailing bytes after payload"
            )
