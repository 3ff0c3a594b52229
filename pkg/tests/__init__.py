""" cochannel: co-channel speech detection toolkit

    Shared helpers for the test suite.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

from typing import Dict, List, Sequence

import numpy as np

from cochannel import AudioClip, ConvLayer, Model
from cochannel._mixer.corpus import Corpus, Gender, Utterance

SAMPLE_RATE = 8000
TINY_CHANNELS = (1, 4, 4, 4, 4, 4, 3)


def tone(freq_hz: float, seconds: float = 0.5, amplitude: float = 0.5, phase: float = 0.0) -> AudioClip:
    """A pure tone at 8 kHz."""
    t = np.arange(int(round(seconds * SAMPLE_RATE))) / SAMPLE_RATE
    return AudioClip(amplitude * np.sin(2.0 * np.pi * freq_hz * t + phase))


def tone_corpus(freqs: Dict[str, Sequence[float]], seconds: float = 0.5) -> Corpus:
    """A corpus whose utterance ``speaker/uN`` is a tone at ``freqs[speaker][N]``."""
    speakers: Dict[str, List[Utterance]] = {}
    for speaker, speaker_freqs in freqs.items():
        speakers[speaker] = [
            Utterance(
                '%s/u%d' % (speaker, number),
                speaker,
                int(round(seconds * SAMPLE_RATE)),
                lambda f=freq: tone(f, seconds),
            )
            for number, freq in enumerate(speaker_freqs)
        ]
    return Corpus(speakers, {name: Gender.Unknown for name in speakers})


def random_model(channels: Sequence[int] = TINY_CHANNELS, seed: int = 0, scale: float = 0.5) -> Model:
    """A model with every parameter (biases included) drawn from N(0, scale^2)."""
    rng = np.random.default_rng(seed)
    layers = [
        ConvLayer(scale * rng.standard_normal((n_out, n_in, 2)), scale * rng.standard_normal(n_out))
        for n_in, n_out in zip(channels, channels[1:])
    ]
    return Model(layers, scale * rng.standard_normal(channels[-1]), float(scale * rng.standard_normal()))


def naive_forward(model: Model, batch: np.ndarray) -> np.ndarray:
    """Overlap probabilities by explicit loops over items, channels, positions and taps."""
    batch = np.asarray(batch, dtype=np.float64)
    probabilities = np.zeros(len(batch))
    for item in range(len(batch)):
        x = [list(batch[item])]
        for layer in model.layers:
            out_len = len(x[0]) - layer.kernel_size + 1
            y = []
            for o in range(layer.out_channels):
                row = []
                for position in range(out_len):
                    total = layer.bias[o]
                    for i in range(layer.in_channels):
                        for tap in range(layer.kernel_size):
                            total += layer.weights[o, i, tap] * x[i][position + tap]
                    row.append(np.tanh(total))
                y.append(row)
            x = y
        logit = model.head_bias[0]
        for channel in range(len(x)):
            logit += model.head_weights[channel] * (sum(x[channel]) / len(x[channel]))
        probabilities[item] = 1.0 / (1.0 + np.exp(-logit))
    return probabilities
