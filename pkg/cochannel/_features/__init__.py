""" cochannel: co-channel speech detection toolkit

    Per-frame feature families and the matrix type they share.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import enum
from typing import Any

import numpy as np

from .._exceptions import ParameterError, PreconditionError, ShapeError
from ..const import _FFT_SIZE, _N_CEPS, _N_GAMMATONE, _N_MEL


@enum.unique
class FeatureKind(enum.Enum):
    MagSpec = 'magspec'
    MFB = 'mfb'
    MFCC = 'mfcc'
    Pykno = 'pykno'

    @property
    def code(self) -> int:
        """Kind code used in feature files and checkpoints."""
        return _KIND_CODES[self]

    @property
    def dim(self) -> int:
        return _KIND_DIMS[self]

    @classmethod
    def from_code(cls, code: int) -> 'FeatureKind':
        for kind, kind_code in _KIND_CODES.items():
            if kind_code == code:
                return kind
        raise ParameterError("Unknown feature kind code %d" % code)


_KIND_CODES = {
    FeatureKind.MagSpec: 0,
    FeatureKind.MFB: 1,
    FeatureKind.MFCC: 2,
    FeatureKind.Pykno: 3,
}

_KIND_DIMS = {
    FeatureKind.MagSpec: _FFT_SIZE // 2 + 1,
    FeatureKind.MFB: _N_MEL,
    FeatureKind.MFCC: 3 * (_N_CEPS + 1),
    FeatureKind.Pykno: _N_GAMMATONE,
}


class FeatureMatrix:

    """A frames x dim matrix of finite reals tagged with its feature kind."""

    __slots__ = ('kind', 'data')

    def __init__(self, kind: FeatureKind, data: Any) -> None:
        matrix = np.array(data, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] != kind.dim:
            raise ShapeError(
                "%s features must be (frames, %d), got %s" % (kind.value, kind.dim, matrix.shape)
            )
        if not np.all(np.isfinite(matrix)):
            raise PreconditionError("%s features contain non-finite values" % kind.value)
        matrix.setflags(write=False)
        self.kind = kind
        self.data = matrix

    def __len__(self) -> int:
        return self.data.shape[0]

    def __eq__(self, other: Any) -> bool:
        return (
            isinstance(other, FeatureMatrix)
            and self.kind is other.kind
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self) -> str:
        return '<FeatureMatrix:{kind=%s, frames=%d, dim=%d}>' % (self.kind.value, len(self), self.dim)

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    @property
    def num_frames(self) -> int:
        return self.data.shape[0]
