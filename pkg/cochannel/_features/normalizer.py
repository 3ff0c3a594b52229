""" cochannel: co-channel speech detection toolkit

    Per-dimension mean/variance normalisation fitted on the training split.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import json
from typing import Any, Dict, Iterable, Optional

import numpy as np

from . import FeatureKind, FeatureMatrix
from .._audio import PathType
from .._exceptions import CompatibilityError, EmptyStreamError, FeatureFileError, ShapeError
from .._logger import log
from ..const import _STD_FLOOR


class Normalizer:

    """An affine map x -> (x - mean) / std fitted on one feature kind.

    ``std`` is the population standard deviation floored at 1e-8, so a
    constant dimension maps to zero instead of dividing by zero.
    """

    __slots__ = ('kind', 'mean', 'std', 'count')

    def __init__(self, kind: FeatureKind, mean: Any, std: Any, count: int = 0) -> None:
        mean = np.array(mean, dtype=np.float64)
        std = np.maximum(np.array(std, dtype=np.float64), _STD_FLOOR)
        if mean.shape != (kind.dim,) or std.shape != (kind.dim,):
            raise ShapeError(
                "%s normalizer needs %d-vectors, got %s/%s" % (kind.value, kind.dim, mean.shape, std.shape)
            )
        self.kind = kind
        self.mean = mean
        self.std = std
        self.count = count

    def __repr__(self) -> str:
        return '<Normalizer:{kind=%s, frames=%d}>' % (self.kind.value, self.count)

    def __eq__(self, other: Any) -> bool:
        return (
            isinstance(other, Normalizer)
            and self.kind is other.kind
            and np.array_equal(self.mean, other.mean)
            and np.array_equal(self.std, other.std)
        )

    def _check(self, fm: FeatureMatrix) -> None:
        if fm.kind is not self.kind:
            raise CompatibilityError("%r cannot normalise %r" % (self, fm))

    def apply(self, fm: FeatureMatrix) -> FeatureMatrix:
        self._check(fm)
        return FeatureMatrix(fm.kind, (fm.data - self.mean) / self.std)

    def invert(self, fm: FeatureMatrix) -> FeatureMatrix:
        self._check(fm)
        return FeatureMatrix(fm.kind, fm.data * self.std + self.mean)

    def as_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind.value,
            'dim': self.kind.dim,
            'count': self.count,
            'mean': self.mean.tolist(),
            'std': self.std.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Normalizer':
        try:
            kind = FeatureKind(data['kind'])
            if data['dim'] != kind.dim:
                raise FeatureFileError("Normalizer dim %s does not match kind %s" % (data['dim'], kind.value))
            return cls(kind, data['mean'], data['std'], int(data['count']))
        except (KeyError, TypeError, ValueError, ShapeError) as exc:
            raise FeatureFileError("Malformed normalizer: %s" % exc) from exc

    def save(self, path: PathType) -> None:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.as_dict(), f, indent=1)
            f.write('\n')

    @classmethod
    def load(cls, path: PathType) -> 'Normalizer':
        with open(path, encoding='utf-8') as f:
            try:
                data = json.load(f)
            except ValueError as exc:
                raise FeatureFileError("Malformed normalizer file %s: %s" % (path, exc)) from exc
        return cls.from_dict(data)


def fit_normalizer(train_features: Iterable[FeatureMatrix]) -> Normalizer:
    """Fit on a stream of training matrices, merging per-matrix moments.

    Matrices are combined with the pairwise update of Chan et al., so the
    stream is consumed once and never concatenated.
    """
    kind: Optional[FeatureKind] = None
    count = 0
    mean = np.zeros(0)
    m2 = np.zeros(0)
    for fm in train_features:
        if kind is None:
            kind = fm.kind
            mean = np.zeros(fm.dim)
            m2 = np.zeros(fm.dim)
        elif fm.kind is not kind:
            raise CompatibilityError("Cannot fit %s and %s features together" % (kind.value, fm.kind.value))
        n = len(fm)
        if not n:
            continue
        batch_mean = fm.data.mean(axis=0)
        batch_m2 = np.sum(np.square(fm.data - batch_mean), axis=0)
        total = count + n
        delta = batch_mean - mean
        mean = mean + delta * (n / total)
        m2 = m2 + batch_m2 + np.square(delta) * (count * n / total)
        count = total
    if kind is None or not count:
        raise EmptyStreamError("Cannot fit a normalizer on an empty feature stream")
    normalizer = Normalizer(kind, mean, np.sqrt(m2 / count), count)
    log.info('Fitted %r', normalizer)
    return normalizer


def apply_normalizer(fm: FeatureMatrix, norm: Normalizer) -> FeatureMatrix:
    return norm.apply(fm)


def unnormalize(fm: FeatureMatrix, norm: Normalizer) -> FeatureMatrix:
    return norm.invert(fm)
