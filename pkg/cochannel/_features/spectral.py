""" cochannel: co-channel speech detection toolkit

    Short-time spectra, Mel filterbank energies and cepstra.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

from typing import Optional, Tuple

import numpy as np
from scipy.fft import dct, idct, rfft, rfftfreq

from . import FeatureKind, FeatureMatrix
from .._audio import AudioClip, FrameGrid, frame_signal, preemphasize
from .._exceptions import ParameterError, ShapeError
from ..const import (
    _DELTA_WINDOW,
    _FFT_SIZE,
    _LIFTER,
    _LOG_FLOOR,
    _MEL_RANGE,
    _N_CEPS,
    _N_MEL,
    _PREEMPHASIS,
    _SAMPLE_RATE,
)


def hz_to_mel(freq_hz: np.ndarray) -> np.ndarray:
    return 2595.0 * np.log10(1.0 + np.asarray(freq_hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel: np.ndarray) -> np.ndarray:
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def magnitude_spectrum(frames: np.ndarray, fft_size: int = _FFT_SIZE) -> np.ndarray:
    """|DFT| of Hamming-windowed frames zero-padded to ``fft_size``; unique half only."""
    num_frames, frame_len = frames.shape
    if fft_size < frame_len:
        raise ParameterError("FFT size %d is shorter than the %d-sample frame" % (fft_size, frame_len))
    if not num_frames:
        return np.zeros((0, fft_size // 2 + 1))
    return np.abs(rfft(frames * np.hamming(frame_len), n=fft_size, axis=1))


def stft_magnitude(
    clip: AudioClip, grid: Optional[FrameGrid] = None, fft_size: int = _FFT_SIZE
) -> FeatureMatrix:
    grid = grid or FrameGrid()
    return FeatureMatrix(FeatureKind.MagSpec, magnitude_spectrum(frame_signal(clip, grid), fft_size))


class MelBank:

    """Triangular filters equally spaced on the HTK Mel scale.

    Filter ``j`` rises linearly from edge ``j`` to its centre at edge ``j + 1``
    and falls to zero at edge ``j + 2``, evaluated at the DFT bin frequencies,
    so neighbouring triangles meet at each other's centres.
    """

    __slots__ = ('n_filters', 'fft_bins', 'f_low_hz', 'f_high_hz', 'center_freqs_hz', 'weights')

    def __init__(
        self,
        n_filters: int = _N_MEL,
        fft_size: int = _FFT_SIZE,
        f_low_hz: float = _MEL_RANGE[0],
        f_high_hz: float = _MEL_RANGE[1],
        sample_rate_hz: int = _SAMPLE_RATE,
    ) -> None:
        if n_filters <= 0:
            raise ParameterError("A Mel bank needs at least one filter, got %d" % n_filters)
        if not 0.0 <= f_low_hz < f_high_hz <= sample_rate_hz / 2:
            raise ParameterError(
                "Mel range [%s, %s] Hz must lie inside [0, %s] Hz" % (f_low_hz, f_high_hz, sample_rate_hz / 2)
            )
        edges = mel_to_hz(np.linspace(hz_to_mel(f_low_hz), hz_to_mel(f_high_hz), n_filters + 2))
        bin_freqs = rfftfreq(fft_size, 1.0 / sample_rate_hz)
        lower, center, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]
        rising = (bin_freqs - lower) / (center - lower)
        falling = (upper - bin_freqs) / (upper - center)
        weights = np.maximum(0.0, np.minimum(rising, falling))
        weights.setflags(write=False)
        self.n_filters = n_filters
        self.fft_bins = len(bin_freqs)
        self.f_low_hz = float(f_low_hz)
        self.f_high_hz = float(f_high_hz)
        self.center_freqs_hz = edges[1:-1]
        self.weights = weights

    def __repr__(self) -> str:
        return '<MelBank:{filters=%d, bins=%d, range=%.0f-%.0f Hz}>' % (
            self.n_filters,
            self.fft_bins,
            self.f_low_hz,
            self.f_high_hz,
        )


def mel_filterbank(mag: FeatureMatrix, bank: Optional[MelBank] = None) -> FeatureMatrix:
    """Log Mel filterbank energies from a magnitude spectrogram."""
    bank = bank or MelBank()
    if mag.kind is not FeatureKind.MagSpec or mag.dim != bank.fft_bins:
        raise ShapeError("%r does not match %r" % (mag, bank))
    energies = np.einsum('bf,tf->tb', bank.weights, np.square(mag.data))
    return FeatureMatrix(FeatureKind.MFB, np.log(energies + _LOG_FLOOR))


def log_mel(
    clip: AudioClip, grid: Optional[FrameGrid] = None, bank: Optional[MelBank] = None
) -> FeatureMatrix:
    """The MFB feature family: pre-emphasis, magnitude spectrum, log Mel energies."""
    return mel_filterbank(stft_magnitude(preemphasize(clip, _PREEMPHASIS), grid), bank)


def dct_ii(x: np.ndarray) -> np.ndarray:
    """Orthonormal DCT-II along the last axis."""
    x = np.asarray(x, dtype=np.float64)
    if not x.size:
        return x.copy()
    return dct(x, type=2, norm='ortho', axis=-1)


def idct_ii(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    if not c.size:
        return c.copy()
    return idct(c, type=2, norm='ortho', axis=-1)


def lifter(c: np.ndarray, L: int = _LIFTER) -> np.ndarray:
    """Sinusoidal lifter; the last axis holds c_1, c_2, ... (indexed from 1)."""
    if L <= 0:
        raise ParameterError("Lifter parameter must be positive, got %s" % L)
    c = np.asarray(c, dtype=np.float64)
    k = np.arange(1, c.shape[-1] + 1)
    return (1.0 + (L / 2.0) * np.sin(np.pi * k / L)) * c


def deltas(coeffs: np.ndarray, N: int = _DELTA_WINDOW) -> np.ndarray:
    """Regression deltas over +/-N frames with edge frames replicated."""
    if N < 1:
        raise ParameterError("Delta window must be at least 1, got %d" % N)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    num_frames = coeffs.shape[0]
    if not num_frames:
        return np.zeros_like(coeffs)
    padded = np.pad(coeffs, ((N, N), (0, 0)), mode='edge')
    result = np.zeros_like(coeffs)
    for n in range(1, N + 1):
        result += n * (padded[N + n : N + n + num_frames] - padded[N - n : N - n + num_frames])
    return result / (2.0 * sum(n * n for n in range(1, N + 1)))


def cepstral_statics(
    clip: AudioClip,
    grid: Optional[FrameGrid] = None,
    bank: Optional[MelBank] = None,
    L: int = _LIFTER,
) -> Tuple[np.ndarray, np.ndarray]:
    """(log frame energy, liftered c_1..c_12) of the pre-emphasised clip."""
    grid = grid or FrameGrid()
    emphasized = preemphasize(clip, _PREEMPHASIS)
    log_energies = mel_filterbank(stft_magnitude(emphasized, grid), bank).data
    ceps = dct_ii(log_energies)[:, 1 : _N_CEPS + 1]
    frame_energy = np.sum(np.square(frame_signal(emphasized, grid)), axis=1)
    return np.log(frame_energy + _LOG_FLOOR), lifter(ceps, L)


def mfcc(
    clip: AudioClip,
    grid: Optional[FrameGrid] = None,
    bank: Optional[MelBank] = None,
    L: int = _LIFTER,
    N: int = _DELTA_WINDOW,
) -> FeatureMatrix:
    """Log energy and 12 liftered cepstra, followed by their deltas and delta-deltas."""
    log_energy, ceps = cepstral_statics(clip, grid, bank, L)
    statics = np.hstack([log_energy[:, None], ceps])
    velocity = deltas(statics, N)
    return FeatureMatrix(FeatureKind.MFCC, np.hstack([statics, velocity, deltas(velocity, N)]))
