""" cochannel: co-channel speech detection toolkit

    Fixed-rate mono audio: ingestion, emission, framing and pre-emphasis.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import os
import struct
from typing import Any, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.io import wavfile
from scipy.signal import lfilter

from ._exceptions import (
    AudioFormatError,
    ParameterError,
    PreconditionError,
    SampleRateMismatchError,
    ShapeError,
    UnsupportedEncodingError,
)
from ._logger import log
from .const import _FRAME_LEN, _HOP, _PCM_SCALE, _PREEMPHASIS, _SAMPLE_RATE

PathType = Union[str, os.PathLike]

_WAV_DECODE_EXCEPTIONS = (ValueError, EOFError, struct.error)


class AudioClip:

    """A mono clip of real samples at a fixed sample rate.

    Samples are stored as a read-only float64 array so clips can be shared
    between threads and across mixtures.
    """

    __slots__ = ('samples', 'sample_rate_hz')

    def __init__(self, samples: Any, sample_rate_hz: int = _SAMPLE_RATE) -> None:
        data = np.array(samples, dtype=np.float64)
        if data.ndim != 1:
            raise ShapeError("AudioClip samples must be one-dimensional, got shape %s" % (data.shape,))
        if sample_rate_hz <= 0:
            raise ParameterError("Sample rate must be positive, got %s" % sample_rate_hz)
        data.setflags(write=False)
        self.samples = data
        self.sample_rate_hz = int(sample_rate_hz)

    def __len__(self) -> int:
        return len(self.samples)

    def __eq__(self, other: Any) -> bool:
        return (
            isinstance(other, AudioClip)
            and self.sample_rate_hz == other.sample_rate_hz
            and np.array_equal(self.samples, other.samples)
        )

    def __repr__(self) -> str:
        return '<AudioClip:{samples=%d, rate=%d, duration=%.3fs}>' % (
            len(self.samples),
            self.sample_rate_hz,
            self.duration,
        )

    @property
    def duration(self) -> float:
        """Duration in seconds."""
        return len(self.samples) / self.sample_rate_hz

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.samples)))


class FrameGrid:

    """Frame length and hop, both in samples (canonically 25 ms / 10 ms at 8 kHz)."""

    __slots__ = ('frame_len_samples', 'hop_samples')

    def __init__(self, frame_len_samples: int = _FRAME_LEN, hop_samples: int = _HOP) -> None:
        if frame_len_samples <= 0 or hop_samples <= 0:
            raise ParameterError(
                "Frame length and hop must be positive, got %s/%s" % (frame_len_samples, hop_samples)
            )
        if hop_samples > frame_len_samples:
            raise ParameterError(
                "Hop (%d) must not exceed frame length (%d)" % (hop_samples, frame_len_samples)
            )
        self.frame_len_samples = int(frame_len_samples)
        self.hop_samples = int(hop_samples)

    def __eq__(self, other: Any) -> bool:
        return (
            isinstance(other, FrameGrid)
            and self.frame_len_samples == other.frame_len_samples
            and self.hop_samples == other.hop_samples
        )

    def __hash__(self) -> int:
        return hash((self.frame_len_samples, self.hop_samples))

    def __repr__(self) -> str:
        return 'FrameGrid(frame_len_samples=%d, hop_samples=%d)' % (self.frame_len_samples, self.hop_samples)

    def num_frames(self, num_samples: int) -> int:
        """Number of complete frames in ``num_samples`` samples."""
        if num_samples < self.frame_len_samples:
            return 0
        return (num_samples - self.frame_len_samples) // self.hop_samples + 1


def read_wav(path: PathType) -> AudioClip:
    """Read a 16-bit PCM mono RIFF/WAVE file at 8 kHz.

    Samples are scaled by 1/32768. Files at any other rate are refused rather
    than resampled; converting a corpus is left to the caller.
    """
    try:
        rate, data = wavfile.read(path)
    except _WAV_DECODE_EXCEPTIONS as exc:
        raise AudioFormatError("Malformed WAV file %s: %s" % (path, exc)) from exc
    if data.ndim != 1:
        raise UnsupportedEncodingError("%s has %d channels, only mono is supported" % (path, data.shape[1]))
    if data.dtype != np.int16:
        raise UnsupportedEncodingError("%s is %s, only 16-bit signed PCM is supported" % (path, data.dtype))
    if rate != _SAMPLE_RATE:
        raise SampleRateMismatchError("%s is sampled at %d Hz, expected %d Hz" % (path, rate, _SAMPLE_RATE))
    log.debug('Read %d samples from %s', len(data), path)
    return AudioClip(data.astype(np.float64) / _PCM_SCALE, rate)


def write_wav(clip: AudioClip, path: PathType) -> None:
    """Write a clip as 16-bit PCM mono, rounding to the nearest quantization level."""
    if not clip.is_finite():
        raise PreconditionError("Cannot write %s to %s: samples must be finite" % (clip, path))
    pcm = np.clip(np.rint(clip.samples * _PCM_SCALE), -_PCM_SCALE, _PCM_SCALE - 1).astype(np.int16)
    wavfile.write(path, clip.sample_rate_hz, pcm)


def frame_signal(clip: AudioClip, grid: FrameGrid) -> np.ndarray:
    """Split a clip into complete frames, shape ``(num_frames, frame_len)``.

    Frame ``i`` covers samples ``[i * hop, i * hop + frame_len)``; a trailing
    partial frame is dropped.
    """
    frame_len = grid.frame_len_samples
    if len(clip) < frame_len:
        return np.zeros((0, frame_len))
    return sliding_window_view(clip.samples, frame_len)[:: grid.hop_samples]


def preemphasize(clip: AudioClip, alpha: float = _PREEMPHASIS) -> AudioClip:
    """First-order high-pass y(t) = x(t) - alpha * x(t - 1), with y(0) = x(0)."""
    if not 0.0 <= alpha < 1.0:
        raise ParameterError("Pre-emphasis coefficient must lie in [0, 1), got %s" % alpha)
    if not len(clip):
        return clip
    return AudioClip(lfilter([1.0, -alpha], [1.0], clip.samples), clip.sample_rate_hz)
