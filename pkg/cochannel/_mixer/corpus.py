""" cochannel: co-channel speech detection toolkit

    Speech corpora: user-supplied WAV directories and a synthetic speech-like source.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import enum
import json
import struct
import threading
from collections import OrderedDict
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Mapping, Optional

import numpy as np
from scipy.fft import irfft, rfft, rfftfreq
from scipy.io import wavfile

from .._audio import AudioClip, PathType, read_wav
from .._exceptions import AudioFormatError, ParameterError, SampleRateMismatchError, UnsupportedEncodingError
from .._logger import log
from .._utils.seeds import derive_seed, make_rng
from ..const import (
    _FEMALE_F0_RANGE,
    _MALE_F0_RANGE,
    _SAMPLE_RATE,
    _SYNTH_F0_RANGE,
    _SYNTH_PEAK,
    _SYNTH_UTTERANCE_SECONDS,
)

# Harmonics stop below this frequency so nothing aliases at 8 kHz.
_HARMONIC_CEILING_HZ = 3600.0
_NOISE_HIGHPASS_HZ = 100.0
_NOISE_LEVEL = 0.1  # relative to the voiced rms
_FLOOR_LEVEL = 1e-4  # background hiss, about -70 dB below the peak
_SYLLABLE_SECONDS = (0.15, 0.40)
_PAUSE_SECONDS = (0.06, 0.25)
_RAMP_SECONDS = 0.02
_TREMOLO_HZ = 4.0
# Decoded clips kept in memory per corpus; two per concurrently rendered mixture.
_CACHE_CLIPS = 32


@enum.unique
class Gender(enum.Enum):
    Male = 'male'
    Female = 'female'
    Unknown = 'unknown'


class Utterance:

    """A lazily loaded corpus utterance, keyed ``speaker/name``."""

    __slots__ = ('key', 'speaker', 'num_samples', '_loader')

    def __init__(self, key: str, speaker: str, num_samples: int, loader: Callable[[], AudioClip]) -> None:
        self.key = key
        self.speaker = speaker
        self.num_samples = num_samples
        self._loader = loader

    def __repr__(self) -> str:
        return '<Utterance:{%s, %d samples}>' % (self.key, self.num_samples)

    def load(self) -> AudioClip:
        return self._loader()


class Corpus:

    """Utterances grouped by speaker, with optional speaker genders.

    Loaded clips go through a least-recently-used cache of ``cache_size`` clips;
    ``cache_size=0`` decodes on every load.
    """

    def __init__(
        self,
        speakers: Mapping[str, List[Utterance]],
        genders: Optional[Mapping[str, Gender]] = None,
        cache_size: int = _CACHE_CLIPS,
    ) -> None:
        if cache_size < 0:
            raise ParameterError("Cache size must be non-negative, got %d" % cache_size)
        self.speakers: Dict[str, List[Utterance]] = {name: list(utts) for name, utts in speakers.items()}
        self.genders: Dict[str, Gender] = {name: Gender.Unknown for name in self.speakers}
        self.genders.update(genders or {})
        self._by_key = {utt.key: utt for utts in self.speakers.values() for utt in utts}
        self.cache_size = cache_size
        self._cache: "OrderedDict[str, AudioClip]" = OrderedDict()
        self._cache_lock = threading.Lock()

    def __repr__(self) -> str:
        return '<%s:{speakers=%d, utterances=%d}>' % (
            type(self).__name__,
            len(self.speakers),
            len(self._by_key),
        )

    def __iter__(self) -> Iterator[Utterance]:
        for name in sorted(self.speakers):
            yield from self.speakers[name]

    def utterance(self, key: str) -> Utterance:
        return self._by_key[key]

    def load(self, key: str) -> AudioClip:
        """Load the audio for ``key``, keeping the most recently used clips in memory."""
        with self._cache_lock:
            clip = self._cache.get(key)
            if clip is not None:
                self._cache.move_to_end(key)
                return clip
        clip = self._by_key[key].load()
        with self._cache_lock:
            self._cache[key] = clip
            self._cache.move_to_end(key)
            while len(self._cache) > self.cache_size:
                self._cache.popitem(last=False)
        return clip

    @property
    def total_seconds(self) -> float:
        return sum(utt.num_samples for utt in self) / _SAMPLE_RATE


class WavCorpus(Corpus):

    """A directory tree ``root/<speaker>/*.wav``.

    Genders are read from an optional ``root/speakers.json`` mapping speaker
    names to ``"male"`` or ``"female"``. Durations come from the WAV headers so
    planning a dataset does not decode any audio.
    """

    def __init__(self, root: PathType, cache_size: int = _CACHE_CLIPS) -> None:
        self.root = Path(root)
        speakers: Dict[str, List[Utterance]] = {}
        for speaker_dir in sorted(p for p in self.root.iterdir() if p.is_dir()):
            utterances = []
            for wav_path in sorted(speaker_dir.glob('*.wav')):
                utterances.append(
                    Utterance(
                        '%s/%s' % (speaker_dir.name, wav_path.stem),
                        speaker_dir.name,
                        _wav_num_samples(wav_path),
                        _file_loader(wav_path),
                    )
                )
            if utterances:
                speakers[speaker_dir.name] = utterances
        super().__init__(speakers, _read_genders(self.root / 'speakers.json'), cache_size)
        log.info('Loaded corpus %s: %d speakers, %.1f s', self.root, len(self.speakers), self.total_seconds)


def _file_loader(path: Path) -> Callable[[], AudioClip]:
    return lambda: read_wav(path)


def _wav_num_samples(path: Path) -> int:
    try:
        rate, data = wavfile.read(path, mmap=True)
    except (ValueError, EOFError, struct.error) as exc:
        raise AudioFormatError("Malformed WAV file %s: %s" % (path, exc)) from exc
    if rate != _SAMPLE_RATE:
        raise SampleRateMismatchError(
            "%s is sampled at %d Hz, expected %d Hz" % (path, rate, _SAMPLE_RATE)
        )
    if data.ndim != 1 or data.dtype != np.int16:
        raise UnsupportedEncodingError(
            "%s is not 16-bit signed PCM mono (%s, shape %s)" % (path, data.dtype, data.shape)
        )
    return int(data.shape[0])


def _read_genders(path: Path) -> Dict[str, Gender]:
    if not path.exists():
        return {}
    with open(path, encoding='utf-8') as f:
        return {name: Gender(value) for name, value in json.load(f).items()}


class SyntheticCorpus(Corpus):

    """Speech-like speakers for corpus-free runs.

    Speakers alternate male and female, each with its own fundamental
    frequency; every utterance is a :func:`synth_speechlike` clip of two to
    three seconds with a small per-utterance f0 drift.
    """

    def __init__(self, n_speakers: int = 8, utterances_per_speaker: int = 50, seed: int = 0) -> None:
        if n_speakers <= 0 or utterances_per_speaker <= 0:
            raise ParameterError(
                "Synthetic corpus needs speakers and utterances, got %d/%d"
                % (n_speakers, utterances_per_speaker)
            )
        rng = make_rng(seed, 'corpus')
        speakers: Dict[str, List[Utterance]] = {}
        genders: Dict[str, Gender] = {}
        for index in range(n_speakers):
            gender = Gender.Male if index % 2 == 0 else Gender.Female
            f0_low, f0_high = _MALE_F0_RANGE if gender is Gender.Male else _FEMALE_F0_RANGE
            f0 = float(rng.uniform(f0_low, f0_high))
            name = 'spk%02d' % index
            utterances = []
            for number in range(utterances_per_speaker):
                duration = float(rng.uniform(*_SYNTH_UTTERANCE_SECONDS))
                utt_f0 = f0 * float(rng.uniform(0.97, 1.03))
                utt_seed = derive_seed(seed, 'utterance', index, number)
                utterances.append(
                    Utterance(
                        '%s/u%04d' % (name, number),
                        name,
                        int(round(duration * _SAMPLE_RATE)),
                        _synth_loader(duration, utt_f0, utt_seed),
                    )
                )
            speakers[name] = utterances
            genders[name] = gender
        super().__init__(speakers, genders)


def _synth_loader(duration_s: float, f0_hz: float, seed: int) -> Callable[[], AudioClip]:
    return lambda: synth_speechlike(duration_s, f0_hz, seed)


def _syllable_envelope(num_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Alternating syllables and pauses with raised-cosine edges."""
    envelope = np.zeros(num_samples)
    ramp = int(_RAMP_SECONDS * _SAMPLE_RATE)
    position = int(rng.uniform(*_PAUSE_SECONDS) * _SAMPLE_RATE * 0.5)
    while position < num_samples:
        length = int(rng.uniform(*_SYLLABLE_SECONDS) * _SAMPLE_RATE)
        stop = min(position + length, num_samples)
        segment = np.ones(stop - position)
        edge = min(ramp, len(segment) // 2)
        if edge:
            rise = 0.5 - 0.5 * np.cos(np.pi * np.arange(edge) / edge)
            segment[:edge] = rise
            segment[len(segment) - edge :] = rise[::-1]
        envelope[position:stop] = segment * rng.uniform(0.5, 1.0)
        position = stop + int(rng.uniform(*_PAUSE_SECONDS) * _SAMPLE_RATE)
    return envelope


def _pinkish_noise(num_samples: int, rng: np.random.Generator) -> np.ndarray:
    spectrum = rfft(rng.standard_normal(num_samples))
    freqs = rfftfreq(num_samples, 1.0 / _SAMPLE_RATE)
    shaping = np.zeros_like(freqs)
    passband = freqs >= _NOISE_HIGHPASS_HZ
    shaping[passband] = 1.0 / np.sqrt(freqs[passband])
    noise = irfft(spectrum * shaping, n=num_samples)
    rms = np.sqrt(np.mean(np.square(noise)))
    return noise / rms if rms > 0 else noise


def synth_speechlike(duration_s: float, f0_hz: float, seed: int) -> AudioClip:
    """A loosely voice-like 8 kHz test source.

    A harmonic series at ``f0_hz`` with 1/h amplitudes (so the fundamental
    dominates) plus high-passed pink-ish noise, gated by a syllable envelope
    with a slow tremolo, over a faint background hiss. Peak-normalised to 0.9.
    """
    low, high = _SYNTH_F0_RANGE
    if not low <= f0_hz <= high:
        raise ParameterError("f0 %.1f Hz is outside [%s, %s] Hz" % (f0_hz, low, high))
    num_samples = int(round(duration_s * _SAMPLE_RATE))
    if num_samples <= 0:
        return AudioClip(np.zeros(0))
    rng = np.random.default_rng(seed)
    t = np.arange(num_samples) / _SAMPLE_RATE

    harmonics = np.arange(1, int(_HARMONIC_CEILING_HZ // f0_hz) + 1)
    phases = rng.uniform(0.0, 2.0 * np.pi, len(harmonics))
    voiced = np.zeros(num_samples)
    for harmonic, phase in zip(harmonics, phases):
        voiced += np.cos(2.0 * np.pi * harmonic * f0_hz * t + phase) / harmonic
    voiced /= np.sqrt(np.mean(np.square(voiced)))

    excitation = voiced + _NOISE_LEVEL * _pinkish_noise(num_samples, rng)
    tremolo = 0.8 + 0.2 * np.sin(2.0 * np.pi * _TREMOLO_HZ * t + rng.uniform(0.0, 2.0 * np.pi))
    signal = excitation * _syllable_envelope(num_samples, rng) * tremolo
    peak = np.max(np.abs(signal))
    if peak > 0:
        signal *= _SYNTH_PEAK / peak
    signal += _FLOOR_LEVEL * rng.standard_normal(num_samples)
    peak = np.max(np.abs(signal))
    return AudioClip(signal * (_SYNTH_PEAK / peak))
