""" cochannel: co-channel speech detection toolkit

    OVL1 model checkpoints.

    Layout (little-endian):

        magic ``OVL1``, version (u16), feature kind code (u8), input dim (u32),
        completed epochs (u32), learning rate (f8), best dev loss (f8),
        bad-epoch count (u32), layer count (u32),
        per layer: in channels, out channels, kernel size (u32 each),
        head input width (u32),
        per layer: weights (out * in * kernel f8) then bias (out f8),
        head weights (in f8), head bias (1 f8),
        CRC32 of every preceding byte (u32).

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import zlib
from typing import List, NamedTuple, Optional, Tuple

from . import DECODE_EXCEPTIONS, BinaryReader, BinaryWriter
from .._audio import PathType
from .._cnn.model import ConvLayer, Model
from .._cnn.training import TrainingState
from .._exceptions import ChecksumError, CompatibilityError, ParameterError, PreconditionError
from .._features import FeatureKind
from .._logger import log
from ..const import _CHECKPOINT_MAGIC, _CHECKPOINT_VERSION

_CRC_SIZE = 4


class Checkpoint(NamedTuple):
    model: Model
    kind: FeatureKind
    input_dim: int
    state: TrainingState


def encode_checkpoint(
    model: Model, kind: FeatureKind, state: Optional[TrainingState] = None, input_dim: Optional[int] = None
) -> bytes:
    state = state or TrainingState()
    writer = BinaryWriter()
    writer.write_magic(_CHECKPOINT_MAGIC)
    writer.write_short(_CHECKPOINT_VERSION)
    writer.write_byte(kind.code)
    writer.write_int(kind.dim if input_dim is None else input_dim)
    writer.write_int(state.epoch)
    writer.write_double(state.learning_rate)
    writer.write_double(state.best_dev_loss)
    writer.write_int(state.bad_epochs)
    writer.write_int(len(model.layers))
    for layer in model.layers:
        writer.write_int(layer.in_channels)
        writer.write_int(layer.out_channels)
        writer.write_int(layer.kernel_size)
    writer.write_int(model.head_weights.size)
    for param in model.parameters():
        writer.write_array(param, '<f8')
    body = writer.bytes()
    return body + zlib.crc32(body).to_bytes(_CRC_SIZE, 'little')


def _read_shapes(reader: BinaryReader) -> Tuple[List[Tuple[int, int, int]], int]:
    shapes = [(reader.read_int(), reader.read_int(), reader.read_int()) for _ in range(reader.read_int())]
    return shapes, reader.read_int()


def decode_checkpoint(data: bytes, source: object = '<bytes>') -> Checkpoint:
    """Parse a checkpoint; any truncation or corruption raises ChecksumError before a model exists."""
    if len(data) < len(_CHECKPOINT_MAGIC) + _CRC_SIZE:
        raise ChecksumError("%s is too short to be a checkpoint (%d bytes)" % (source, len(data)))
    body, trailer = data[:-_CRC_SIZE], data[-_CRC_SIZE:]
    if zlib.crc32(body) != int.from_bytes(trailer, 'little'):
        raise ChecksumError("%s fails its CRC32 check" % source)

    reader = BinaryReader(body)
    if reader.read_magic(len(_CHECKPOINT_MAGIC)) != _CHECKPOINT_MAGIC:
        raise ChecksumError("%s is not a checkpoint" % source)
    try:
        version = reader.read_short()
        if version != _CHECKPOINT_VERSION:
            raise CompatibilityError(
                "%s has format version %d, expected %d" % (source, version, _CHECKPOINT_VERSION)
            )
        kind = FeatureKind.from_code(reader.read_byte())
        input_dim = reader.read_int()
        epoch, learning_rate, best_dev_loss = reader.read_int(), reader.read_double(), reader.read_double()
        state = TrainingState(epoch, learning_rate, best_dev_loss, reader.read_int())
        shapes, head_in = _read_shapes(reader)
        layers = []
        for n_in, n_out, kernel in shapes:
            weights = reader.read_array('<f8', n_out * n_in * kernel).reshape(n_out, n_in, kernel)
            layers.append(ConvLayer(weights, reader.read_array('<f8', n_out)))
        head_weights = reader.read_array('<f8', head_in)
        head_bias = reader.read_array('<f8', 1)
        model = Model(layers, head_weights, float(head_bias[0]))
    except (ParameterError, PreconditionError, *DECODE_EXCEPTIONS) as exc:
        raise ChecksumError(
            "Malformed checkpoint %s at offset %d: %s" % (source, reader.offset, exc)
        ) from exc
    if reader.remaining:
        raise ChecksumError("%s has %d unexpected bytes before its checksum" % (source, reader.remaining))
    return Checkpoint(model, kind, input_dim, state)


def save_checkpoint(
    model: Model, path: PathType, kind: FeatureKind, state: Optional[TrainingState] = None
) -> None:
    data = encode_checkpoint(model, kind, state)
    with open(path, 'wb') as f:
        f.write(data)
    log.debug('Wrote %d-byte checkpoint %s', len(data), path)


def read_checkpoint(path: PathType) -> Checkpoint:
    with open(path, 'rb') as f:
        return decode_checkpoint(f.read(), path)


def load_checkpoint(
    path: PathType, kind: Optional[FeatureKind] = None, input_dim: Optional[int] = None
) -> Model:
    """Load the model, refusing checkpoints trained on another feature kind or dimension."""
    checkpoint = read_checkpoint(path)
    if kind is not None and checkpoint.kind is not kind:
        raise CompatibilityError(
            "%s was trained on %s features, not %s" % (path, checkpoint.kind.value, kind.value)
        )
    if input_dim is not None and checkpoint.input_dim != input_dim:
        raise CompatibilityError(
            "%s expects %d-dimensional input, got %d" % (path, checkpoint.input_dim, input_dim)
        )
    return checkpoint.model
