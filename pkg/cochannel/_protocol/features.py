""" cochannel: co-channel speech detection toolkit

    FTR1 feature files.

    Layout (little-endian): magic ``FTR1``, kind code (u8), dim (u32),
    frame count (u32), then frames x dim float32 values in row-major order.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

from typing import Optional

from . import DECODE_EXCEPTIONS, BinaryReader, BinaryWriter
from .._audio import PathType
from .._exceptions import CompatibilityError, FeatureFileError, ParameterError, PreconditionError, ShapeError
from .._features import FeatureKind, FeatureMatrix
from ..const import _FEATURE_MAGIC


def encode_features(fm: FeatureMatrix) -> bytes:
    writer = BinaryWriter()
    writer.write_magic(_FEATURE_MAGIC)
    writer.write_byte(fm.kind.code)
    writer.write_int(fm.dim)
    writer.write_int(fm.num_frames)
    writer.write_array(fm.data, '<f4')
    return writer.bytes()


def decode_features(data: bytes, source: object = '<bytes>') -> FeatureMatrix:
    reader = BinaryReader(data)
    try:
        if reader.read_magic(len(_FEATURE_MAGIC)) != _FEATURE_MAGIC:
            raise FeatureFileError("%s is not a feature file" % source)
        kind = FeatureKind.from_code(reader.read_byte())
        dim = reader.read_int()
        num_frames = reader.read_int()
        if dim != kind.dim:
            raise FeatureFileError(
                "%s declares dim %d for %s (expected %d)" % (source, dim, kind.value, kind.dim)
            )
        values = reader.read_array('<f4', num_frames * dim)
    except (ParameterError, *DECODE_EXCEPTIONS) as exc:
        raise FeatureFileError(
            "Malformed feature file %s at offset %d: %s" % (source, reader.offset, exc)
        ) from exc
    if reader.remaining:
        raise FeatureFileError("%s has %d trailing bytes" % (source, reader.remaining))
    try:
        return FeatureMatrix(kind, values.reshape(num_frames, dim))
    except (ShapeError, PreconditionError) as exc:
        raise FeatureFileError("Invalid features in %s: %s" % (source, exc)) from exc


def write_features(fm: FeatureMatrix, path: PathType) -> None:
    with open(path, 'wb') as f:
        f.write(encode_features(fm))


def read_features(path: PathType, kind: Optional[FeatureKind] = None) -> FeatureMatrix:
    """Read an FTR1 file, optionally insisting on a feature kind."""
    with open(path, 'rb') as f:
        fm = decode_features(f.read(), path)
    if kind is not None and fm.kind is not kind:
        raise CompatibilityError("%s holds %s features, expected %s" % (path, fm.kind.value, kind.value))
    return fm
