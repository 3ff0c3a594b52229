""" cochannel: co-channel speech detection toolkit

    One entry point for the four feature families.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

from typing import Optional

from . import FeatureKind, FeatureMatrix
from .pyknogram import GammatoneBank, design_gammatone_bank, pyknogram
from .spectral import MelBank, log_mel, mfcc, stft_magnitude
from .._audio import AudioClip, FrameGrid


class FeatureExtractor:

    """Extract one feature kind with shared, immutable filterbanks.

    Instances hold no per-clip state and may be used from several threads.
    """

    __slots__ = ('kind', 'grid', 'mel_bank', 'gammatone_bank')

    def __init__(self, kind: FeatureKind, grid: Optional[FrameGrid] = None) -> None:
        self.kind = kind
        self.grid = grid or FrameGrid()
        self.mel_bank = MelBank() if kind in (FeatureKind.MFB, FeatureKind.MFCC) else None
        self.gammatone_bank: Optional[GammatoneBank] = (
            design_gammatone_bank() if kind is FeatureKind.Pykno else None
        )

    def __repr__(self) -> str:
        return '<FeatureExtractor:{%s, %r}>' % (self.kind.value, self.grid)

    def __call__(self, clip: AudioClip) -> FeatureMatrix:
        if self.kind is FeatureKind.MagSpec:
            return stft_magnitude(clip, self.grid)
        if self.kind is FeatureKind.MFB:
            return log_mel(clip, self.grid, self.mel_bank)
        if self.kind is FeatureKind.MFCC:
            return mfcc(clip, self.grid, self.mel_bank)
        return pyknogram(clip, self.gammatone_bank, self.grid)


def extract(kind: FeatureKind, clip: AudioClip, grid: Optional[FrameGrid] = None) -> FeatureMatrix:
    return FeatureExtractor(kind, grid)(clip)
