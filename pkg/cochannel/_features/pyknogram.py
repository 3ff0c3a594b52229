""" cochannel: co-channel speech detection toolkit

    Gammatone analysis, Teager-Kaiser energy tracking and the pyknogram.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

from typing import Optional, Tuple

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft, rfftfreq

from . import FeatureKind, FeatureMatrix
from .._audio import AudioClip, FrameGrid
from .._exceptions import ParameterError, ShapeError
from .._logger import log
from ..const import (
    _ERB_FACTOR,
    _GAMMATONE_ORDER,
    _GAMMATONE_RANGE,
    _GAMMATONE_TAIL,
    _LOG_FLOOR,
    _N_GAMMATONE,
    _PYKNO_ACCEPTANCE_RATIO,
    _SAMPLE_RATE,
)

# Glasberg & Moore ERB-rate constants
_EAR_Q = 9.26449
_MIN_BW = 24.7

# sin^2 below this makes the amplitude estimate meaningless
_MIN_SIN_SQUARED = 1e-12


def erb(freq_hz: np.ndarray) -> np.ndarray:
    """Equivalent rectangular bandwidth in Hz."""
    return _MIN_BW * (4.37 * np.asarray(freq_hz, dtype=np.float64) / 1000.0 + 1.0)


def erb_space(f_low_hz: float, f_high_hz: float, n_channels: int) -> np.ndarray:
    """Centre frequencies equally spaced on the ERB-rate scale, ascending, both ends included."""
    scale = _EAR_Q * _MIN_BW
    low = _EAR_Q * np.log1p(f_low_hz / scale)
    high = _EAR_Q * np.log1p(f_high_hz / scale)
    return scale * np.expm1(np.linspace(low, high, n_channels) / _EAR_Q)


def teo(x: np.ndarray) -> np.ndarray:
    """Teager-Kaiser energy x(n)^2 - x(n-1)x(n+1) for n = 1 .. len - 2."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or len(x) < 3:
        raise ShapeError("TEO needs a 1-D sequence of at least 3 samples, got shape %s" % (x.shape,))
    return np.square(x[1:-1]) - x[:-2] * x[2:]


def desa1(x: np.ndarray, sample_rate_hz: int = _SAMPLE_RATE) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Instantaneous amplitude and frequency by DESA-1.

    Returns ``(amp, freq_hz, valid)``, each aligned with ``x``. Sample ``n``
    needs ``x(n - 2) .. x(n + 1)``; samples without that support, with a
    non-positive TEO or with an arccos argument outside [-1, 1] are marked
    invalid and carry zeros.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or len(x) < 4:
        raise ShapeError("DESA-1 needs a 1-D sequence of at least 4 samples, got shape %s" % (x.shape,))
    num_samples = len(x)
    amp = np.zeros(num_samples)
    freq_hz = np.zeros(num_samples)
    valid = np.zeros(num_samples, dtype=bool)
    if num_samples < 5:
        return amp, freq_hz, valid

    psi_x = teo(x)[1:-1]  # n = 2 .. N - 3
    psi_y = teo(np.diff(x))  # n = 2 .. N - 2
    psi_y_sum = psi_y[:-1] + psi_y[1:]
    with np.errstate(divide='ignore', invalid='ignore'):
        argument = 1.0 - psi_y_sum / (4.0 * psi_x)
    ok = (psi_x > 0.0) & (np.abs(argument) <= 1.0)
    omega = np.arccos(np.where(ok, argument, 1.0))
    sin_squared = np.sin(omega) ** 2
    ok &= sin_squared > _MIN_SIN_SQUARED

    inner = slice(2, num_samples - 2)
    valid[inner] = ok
    freq_hz[inner] = np.where(ok, omega * sample_rate_hz / (2.0 * np.pi), 0.0)
    with np.errstate(divide='ignore', invalid='ignore'):
        amp[inner] = np.where(ok, np.sqrt(np.abs(psi_x) / np.where(ok, sin_squared, 1.0)), 0.0)
    return amp, freq_hz, valid


class GammatoneBank:

    """Fourth-order gammatone filters on ERB-rate spaced centres.

    Each channel applies the one-sided transfer function
    ``(1 + j (f - fc) / b) ** -order`` with ``b = 1.019 * ERB(fc)``, which has
    unit gain at ``fc`` and a magnitude peak exactly there. Filtering runs in
    the frequency domain over a zero-padded block, so the filter tail is not
    wrapped onto the start of the clip.
    """

    __slots__ = ('n_channels', 'center_freqs_hz', 'bandwidths_hz', 'sample_rate_hz', 'order')

    def __init__(
        self,
        center_freqs_hz: np.ndarray,
        sample_rate_hz: int = _SAMPLE_RATE,
        order: int = _GAMMATONE_ORDER,
    ) -> None:
        centers = np.array(center_freqs_hz, dtype=np.float64)
        centers.setflags(write=False)
        bandwidths = _ERB_FACTOR * erb(centers)
        bandwidths.setflags(write=False)
        self.n_channels = len(centers)
        self.center_freqs_hz = centers
        self.bandwidths_hz = bandwidths
        self.sample_rate_hz = sample_rate_hz
        self.order = order

    def __repr__(self) -> str:
        return '<GammatoneBank:{channels=%d, %.1f-%.1f Hz}>' % (
            self.n_channels,
            self.center_freqs_hz[0],
            self.center_freqs_hz[-1],
        )

    def frequency_response(self, n_fft: int, channel: Optional[int] = None) -> np.ndarray:
        """Complex response on the ``rfft`` bins of an ``n_fft``-point transform.

        Shape ``(n_channels, n_fft // 2 + 1)``, or one row when ``channel`` is given.
        """
        freqs = rfftfreq(n_fft, 1.0 / self.sample_rate_hz)
        if channel is None:
            centers, widths = self.center_freqs_hz[:, None], self.bandwidths_hz[:, None]
        else:
            centers, widths = self.center_freqs_hz[channel], self.bandwidths_hz[channel]
        return (1.0 + 1j * (freqs - centers) / widths) ** -self.order

    def impulse_responses(self, length: int = _GAMMATONE_TAIL) -> np.ndarray:
        """Real impulse responses, shape ``(n_channels, length)``."""
        return irfft(self.frequency_response(length), n=length, axis=-1)

    def filter_channel(self, spectrum: np.ndarray, n_fft: int, num_samples: int, channel: int) -> np.ndarray:
        """Output of one channel given the ``rfft`` of the zero-padded input."""
        return irfft(spectrum * self.frequency_response(n_fft, channel), n=n_fft)[:num_samples]

    def filter(self, samples: np.ndarray) -> np.ndarray:
        """All channel outputs for ``samples``, shape ``(n_channels, len(samples))``."""
        samples = np.asarray(samples, dtype=np.float64)
        n_fft = next_fast_len(len(samples) + _GAMMATONE_TAIL, real=True)
        spectrum = rfft(samples, n=n_fft)
        return np.stack(
            [self.filter_channel(spectrum, n_fft, len(samples), k) for k in range(self.n_channels)]
        )


def design_gammatone_bank(
    n_channels: int = _N_GAMMATONE,
    f_low_hz: float = _GAMMATONE_RANGE[0],
    f_high_hz: float = _GAMMATONE_RANGE[1],
    sample_rate_hz: int = _SAMPLE_RATE,
) -> GammatoneBank:
    if n_channels < 1:
        raise ParameterError("A gammatone bank needs at least one channel, got %d" % n_channels)
    if not 0.0 < f_low_hz < f_high_hz < sample_rate_hz / 2:
        raise ParameterError(
            "Gammatone range must satisfy 0 < %s < %s < %s Hz" % (f_low_hz, f_high_hz, sample_rate_hz / 2)
        )
    return GammatoneBank(erb_space(f_low_hz, f_high_hz, n_channels), sample_rate_hz)


def _frame_means(values: np.ndarray, weights: np.ndarray, grid: FrameGrid, num_frames: int) -> np.ndarray:
    """Per-frame sum(values) / sum(weights), 0 where a frame has no weight."""
    starts = np.arange(num_frames) * grid.hop_samples
    stops = starts + grid.frame_len_samples
    value_sums = np.concatenate(([0.0], np.cumsum(values)))
    weight_sums = np.concatenate(([0], np.cumsum(weights)))
    totals = np.maximum(value_sums[stops] - value_sums[starts], 0.0)
    counts = weight_sums[stops] - weight_sums[starts]
    return np.where(counts > 0, totals / np.maximum(counts, 1), 0.0)


def pyknogram_energy(
    clip: AudioClip,
    bank: Optional[GammatoneBank] = None,
    grid: Optional[FrameGrid] = None,
    acceptance_ratio: float = _PYKNO_ACCEPTANCE_RATIO,
) -> np.ndarray:
    """Linear-domain pyknogram, shape ``(frames, n_channels)``.

    A DESA-1 sample of channel k is accepted when its frequency lies within
    ``acceptance_ratio * bandwidth / 2`` of the channel centre; the frame value
    is the mean squared amplitude over accepted samples.
    """
    bank = bank or design_gammatone_bank()
    grid = grid or FrameGrid()
    if clip.sample_rate_hz != bank.sample_rate_hz:
        raise ParameterError("Clip at %d Hz does not match %r" % (clip.sample_rate_hz, bank))
    if not 0.0 < acceptance_ratio:
        raise ParameterError("Acceptance ratio must be positive, got %s" % acceptance_ratio)
    num_frames = grid.num_frames(len(clip))
    energy = np.zeros((num_frames, bank.n_channels))
    if not num_frames:
        return energy

    num_samples = len(clip)
    n_fft = next_fast_len(num_samples + _GAMMATONE_TAIL, real=True)
    spectrum = rfft(clip.samples, n=n_fft)
    tolerance = acceptance_ratio * bank.bandwidths_hz / 2.0
    for k in range(bank.n_channels):
        band = bank.filter_channel(spectrum, n_fft, num_samples, k)
        amp, freq_hz, valid = desa1(band, bank.sample_rate_hz)
        accepted = valid & (np.abs(freq_hz - bank.center_freqs_hz[k]) <= tolerance[k])
        energy[:, k] = _frame_means(np.where(accepted, np.square(amp), 0.0), accepted, grid, num_frames)
    log.debug(
        'Pyknogram of %s: %d frames, %.1f%% cells active', clip, num_frames, 100.0 * np.mean(energy > 0)
    )
    return energy


def pyknogram(
    clip: AudioClip,
    bank: Optional[GammatoneBank] = None,
    grid: Optional[FrameGrid] = None,
    acceptance_ratio: float = _PYKNO_ACCEPTANCE_RATIO,
) -> FeatureMatrix:
    return FeatureMatrix(
        FeatureKind.Pykno, np.log(pyknogram_energy(clip, bank, grid, acceptance_ratio) + _LOG_FLOOR)
    )
