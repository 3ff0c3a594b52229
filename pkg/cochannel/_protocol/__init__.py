""" cochannel: co-channel speech detection toolkit

    Little-endian binary record readers and writers shared by the on-disk formats.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import struct
from typing import Any, List, Tuple, Union

import numpy as np

DECODE_EXCEPTIONS = (IndexError, ValueError, struct.error)


class BinaryWriter:

    """Accumulate packed fields; ``bytes()`` joins them."""

    __slots__ = ('data', 'size')

    def __init__(self) -> None:
        self.data: List[bytes] = []
        self.size = 0

    def _pack(self, format_: Union[bytes, str], *values: Any) -> None:
        chunk = struct.pack(format_, *values)
        self.data.append(chunk)
        self.size += len(chunk)

    def write_magic(self, magic: bytes) -> None:
        self.data.append(magic)
        self.size += len(magic)

    def write_byte(self, value: int) -> None:
        self._pack('<B', value)

    def write_short(self, value: int) -> None:
        self._pack('<H', value)

    def write_int(self, value: int) -> None:
        """Writes an unsigned 32-bit integer"""
        self._pack('<I', value)

    def write_double(self, value: float) -> None:
        self._pack('<d', value)

    def write_array(self, values: np.ndarray, dtype: str) -> None:
        chunk = np.ascontiguousarray(values, dtype=dtype).tobytes()
        self.data.append(chunk)
        self.size += len(chunk)

    def bytes(self) -> bytes:
        return b''.join(self.data)


class BinaryReader:

    """Walk a byte string field by field, tracking the offset."""

    __slots__ = ('data', 'offset')

    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    @property
    def remaining(self) -> int:
        return len(self.data) - self.offset

    def _unpack(self, format_: str) -> Tuple[Any, ...]:
        length = struct.calcsize(format_)
        info = struct.unpack(format_, self.data[self.offset : self.offset + length])
        self.offset += length
        return info

    def read_magic(self, length: int) -> bytes:
        magic = self.data[self.offset : self.offset + length]
        self.offset += length
        return magic

    def read_byte(self) -> int:
        return self._unpack('<B')[0]

    def read_short(self) -> int:
        return self._unpack('<H')[0]

    def read_int(self) -> int:
        return self._unpack('<I')[0]

    def read_double(self) -> float:
        return self._unpack('<d')[0]

    def read_array(self, dtype: str, count: int) -> np.ndarray:
        itemsize = np.dtype(dtype).itemsize
        if count * itemsize > self.remaining:
            raise IndexError(
                "Need %d bytes at offset %d, %d left" % (count * itemsize, self.offset, self.remaining)
            )
        values = np.frombuffer(self.data, dtype=dtype, count=count, offset=self.offset)
        self.offset += count * itemsize
        return values.astype(np.float64)
