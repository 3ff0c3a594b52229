""" cochannel: co-channel speech detection toolkit

    Co-channel mixing at a controlled signal-to-interference ratio.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import enum
from typing import Any, Dict, NamedTuple, Optional, Tuple

import numpy as np

from .._audio import AudioClip, FrameGrid, frame_signal
from .._exceptions import DegenerateSourceError, ParameterError, ShapeError
from .._logger import log
from ..const import _LABEL_OVERLAP, _LABEL_SINGLE, _SAMPLE_RATE, _SIR_RANGE_DB, _VAD_THRESHOLD_DB

SampleRange = Tuple[int, int]


@enum.unique
class FrameLabel(enum.Enum):
    Overlap = _LABEL_OVERLAP
    Single = _LABEL_SINGLE


def labels_to_text(labels: np.ndarray) -> str:
    """Render a boolean overlap mask as one ``O``/``S`` character per frame."""
    return ''.join(_LABEL_OVERLAP if flag else _LABEL_SINGLE for flag in labels)


def labels_from_text(text: str) -> np.ndarray:
    """Parse ``O``/``S`` characters back into a boolean overlap mask."""
    try:
        return np.array([FrameLabel(char) is FrameLabel.Overlap for char in text], dtype=bool)
    except ValueError as exc:
        raise ShapeError("Invalid frame label in %r" % text[:32]) from exc


class MixtureSpec(NamedTuple):
    """Everything needed to reproduce one mixture from its two source utterances."""

    target_utterance: str
    interferer_utterance: str
    sir_db: float
    offset_samples: int
    seed: int

    def validate(self, target_length: Optional[int] = None) -> None:
        if speaker_of(self.target_utterance) == speaker_of(self.interferer_utterance):
            raise ParameterError(
                "Target %s and interferer %s come from the same speaker"
                % (self.target_utterance, self.interferer_utterance)
            )
        low, high = _SIR_RANGE_DB
        if not low <= self.sir_db <= high:
            raise ParameterError("SIR %.3f dB is outside [%s, %s] dB" % (self.sir_db, low, high))
        if self.offset_samples < 0:
            raise ParameterError("Offset must be non-negative, got %d" % self.offset_samples)
        if target_length is not None and self.offset_samples >= target_length:
            raise ParameterError(
                "Offset %d is not inside the target utterance (%d samples)"
                % (self.offset_samples, target_length)
            )

    def as_dict(self) -> Dict[str, Any]:
        return self._asdict()


def speaker_of(utterance_key: str) -> str:
    """Corpus keys are ``speaker/utterance``."""
    return utterance_key.split('/', 1)[0]


class LabeledMixture:

    """A mixed clip with one overlap/single label per complete frame.

    ``frame_labels`` is a boolean array, True where both talkers are active.
    ``gain`` is the interferer gain before the global ``rescale_factor``.
    """

    __slots__ = ('clip', 'frame_labels', 'grid', 'realized_sir_db', 'gain', 'rescale_factor')

    def __init__(
        self,
        clip: AudioClip,
        frame_labels: np.ndarray,
        grid: FrameGrid,
        realized_sir_db: float,
        gain: float = 1.0,
        rescale_factor: float = 1.0,
    ) -> None:
        if len(frame_labels) != grid.num_frames(len(clip)):
            raise ShapeError(
                "%d labels for a clip with %d frames" % (len(frame_labels), grid.num_frames(len(clip)))
            )
        self.clip = clip
        self.frame_labels = np.asarray(frame_labels, dtype=bool)
        self.grid = grid
        self.realized_sir_db = realized_sir_db
        self.gain = gain
        self.rescale_factor = rescale_factor

    def __repr__(self) -> str:
        return '<LabeledMixture:{%s, frames=%d, overlap=%d, sir=%.2fdB, rescale=%.4f}>' % (
            self.clip,
            len(self.frame_labels),
            int(self.frame_labels.sum()),
            self.realized_sir_db,
            self.rescale_factor,
        )

    @property
    def overlap_fraction(self) -> float:
        if not len(self.frame_labels):
            return 0.0
        return float(self.frame_labels.mean())


def _region_power(samples: np.ndarray, region: SampleRange) -> float:
    start, stop = region
    segment = samples[start:stop]
    if not len(segment):
        return 0.0
    return float(np.mean(np.square(segment)))


def scale_to_sir(
    target: AudioClip, interferer: AudioClip, sir_db: float, overlap_region: SampleRange
) -> float:
    """Gain g for the interferer so that the SIR over ``overlap_region`` is ``sir_db``.

    Power is the mean squared amplitude over the region, taken on both clips
    at the same sample indices.
    """
    target_power = _region_power(target.samples, overlap_region)
    interferer_power = _region_power(interferer.samples, overlap_region)
    if target_power <= 0.0 or interferer_power <= 0.0:
        raise DegenerateSourceError(
            "Zero energy in overlap region %s (target %.3g, interferer %.3g)"
            % (overlap_region, target_power, interferer_power)
        )
    return float(np.sqrt(target_power / (interferer_power * 10.0 ** (sir_db / 10.0))))


def label_frames(
    target: AudioClip,
    scaled_interferer_placed: AudioClip,
    grid: FrameGrid,
    vad_threshold_db: float = _VAD_THRESHOLD_DB,
) -> np.ndarray:
    """Label each frame as overlap (True) when both sources are active.

    A source is active in a frame when its frame energy exceeds
    ``vad_threshold_db`` relative to that source's loudest frame.
    """
    if len(target) != len(scaled_interferer_placed):
        raise ShapeError(
            "Sources must be aligned: %d vs %d samples" % (len(target), len(scaled_interferer_placed))
        )
    return _active_frames(target, grid, vad_threshold_db) & _active_frames(
        scaled_interferer_placed, grid, vad_threshold_db
    )


def _active_frames(clip: AudioClip, grid: FrameGrid, vad_threshold_db: float) -> np.ndarray:
    energies = np.sum(np.square(frame_signal(clip, grid)), axis=1)
    if not len(energies):
        return np.zeros(0, dtype=bool)
    peak = energies.max()
    if peak <= 0.0:
        return np.zeros(len(energies), dtype=bool)
    return energies > peak * 10.0 ** (vad_threshold_db / 10.0)


def mix_at_offset(
    target: AudioClip,
    interferer: AudioClip,
    spec: MixtureSpec,
    grid: Optional[FrameGrid] = None,
    vad_threshold_db: float = _VAD_THRESHOLD_DB,
) -> LabeledMixture:
    """Add the interferer to the target starting at ``spec.offset_samples``.

    The interferer is scaled to ``spec.sir_db`` over the overlapping samples.
    A mixture whose peak exceeds full scale is rescaled as a whole, which
    leaves the SIR untouched.
    """
    if target.sample_rate_hz != _SAMPLE_RATE or interferer.sample_rate_hz != _SAMPLE_RATE:
        raise ParameterError(
            "Sources must be sampled at %d Hz, got %d/%d"
            % (_SAMPLE_RATE, target.sample_rate_hz, interferer.sample_rate_hz)
        )
    spec.validate(len(target))
    grid = grid or FrameGrid()
    offset = spec.offset_samples
    length = max(len(target), offset + len(interferer))

    target_placed = np.zeros(length)
    target_placed[: len(target)] = target.samples
    interferer_placed = np.zeros(length)
    interferer_placed[offset : offset + len(interferer)] = interferer.samples
    region = (offset, min(len(target), offset + len(interferer)))

    gain = scale_to_sir(AudioClip(target_placed), AudioClip(interferer_placed), spec.sir_db, region)
    interferer_scaled = gain * interferer_placed
    mixed = target_placed + interferer_scaled

    peak = float(np.max(np.abs(mixed))) if length else 0.0
    rescale_factor = 1.0 / peak if peak > 1.0 else 1.0
    if rescale_factor != 1.0:
        mixed *= rescale_factor

    realized_sir_db = 10.0 * np.log10(
        _region_power(target_placed, region) / _region_power(interferer_scaled, region)
    )
    labels = label_frames(AudioClip(target_placed), AudioClip(interferer_scaled), grid, vad_threshold_db)
    log.debug(
        'Mixed %s + %s at offset %d: sir=%.3f dB, gain=%.4f, rescale=%.4f, overlap frames %d/%d',
        spec.target_utterance,
        spec.interferer_utterance,
        offset,
        realized_sir_db,
        gain,
        rescale_factor,
        int(labels.sum()),
        len(labels),
    )
    return LabeledMixture(
        AudioClip(mixed), labels, grid, float(realized_sir_db), gain=gain, rescale_factor=rescale_factor
    )
