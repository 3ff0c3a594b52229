#!/usr/bin/env python


""" Unit tests for cochannel._mixer.mixing. """

import logging

import numpy as np
import pytest

import cochannel as r
from cochannel import (
    AudioClip,
    FrameGrid,
    LabeledMixture,
    MixtureSpec,
    label_frames,
    mix_at_offset,
    scale_to_sir,
)
from cochannel._mixer.mixing import labels_from_text, labels_to_text, speaker_of

from .. import tone

log = logging.getLogger('cochannel')
original_logging_level = logging.NOTSET


def setup_module():
    global original_logging_level
    original_logging_level = log.level
    log.setLevel(logging.DEBUG)


def teardown_module():
    if original_logging_level != logging.NOTSET:
        log.setLevel(original_logging_level)


def test_label_text():
    labels = np.array([True, False, False, True])
    assert labels_to_text(labels) == 'OSSO'
    np.testing.assert_array_equal(labels_from_text('OSSO'), labels)
    assert labels_from_text('').shape == (0,)
    with pytest.raises(r.ShapeError):
        labels_from_text('OSX')


def test_speaker_of():
    assert speaker_of('spk03/u0001') == 'spk03'


def test_spec_validation():
    MixtureSpec('a/1', 'b/1', 2.5, 10, 0).validate(100)
    with pytest.raises(r.ParameterError):
        MixtureSpec('a/1', 'a/2', 2.5, 10, 0).validate()
    with pytest.raises(r.ParameterError):
        MixtureSpec('a/1', 'b/1', 5.5, 10, 0).validate()
    with pytest.raises(r.ParameterError):
        MixtureSpec('a/1', 'b/1', 2.5, -1, 0).validate()
    with pytest.raises(r.ParameterError):
        MixtureSpec('a/1', 'b/1', 2.5, 100, 0).validate(100)


def test_scale_to_sir():
    target = AudioClip(np.ones(100))
    interferer = AudioClip(2.0 * np.ones(100))
    assert scale_to_sir(target, interferer, 0.0, (0, 100)) == pytest.approx(0.5)
    assert scale_to_sir(target, interferer, 10.0, (0, 100)) == pytest.approx(np.sqrt(1.0 / 40.0))


def test_scale_to_sir_needs_energy():
    with pytest.raises(r.DegenerateSourceError):
        scale_to_sir(AudioClip(np.zeros(100)), AudioClip(np.ones(100)), 0.0, (0, 100))


def test_mixture_length_and_labels():
    target = tone(440.0, seconds=1.0)
    interferer = tone(300.0, seconds=0.5)
    mixture = mix_at_offset(target, interferer, MixtureSpec('a/t', 'b/i', 3.0, 4000, 0))
    assert len(mixture.clip) == 8000
    assert len(mixture.frame_labels) == FrameGrid().num_frames(8000) == 98
    # frames ending before the interferer starts are single, frames inside the overlap are overlap
    assert not mixture.frame_labels[:48].any()
    assert mixture.frame_labels[50:].all()
    assert mixture.realized_sir_db == pytest.approx(3.0, abs=1e-9)
    assert mixture.rescale_factor == 1.0


def test_interferer_running_past_the_target_extends_the_mixture():
    mixture = mix_at_offset(tone(440.0, 0.5), tone(300.0, 0.5), MixtureSpec('a/t', 'b/i', 0.0, 2000, 0))
    assert len(mixture.clip) == 6000
    assert not mixture.frame_labels[-1]


def test_loud_mixture_is_rescaled_without_changing_sir():
    target = tone(440.0, amplitude=0.9)
    interferer = tone(445.0, amplitude=0.9)
    mixture = mix_at_offset(target, interferer, MixtureSpec('a/t', 'b/i', 0.0, 0, 0))
    assert mixture.rescale_factor < 1.0
    assert np.max(np.abs(mixture.clip.samples)) == pytest.approx(1.0)
    assert mixture.realized_sir_db == pytest.approx(0.0, abs=1e-9)


def test_realized_sir_matches_request():
    """Realized SIR over the overlap stays within 0.1 dB for random specs."""
    sources = [r.synth_speechlike(0.6, f0, seed) for seed, f0 in enumerate((110.0, 140.0, 190.0, 240.0))]
    rng = np.random.default_rng(11)
    for _ in range(200):
        t, i = rng.choice(len(sources), 2, replace=False)
        spec = MixtureSpec(
            'spk%d/u' % t, 'spk%d/u' % i, float(rng.uniform(0, 5)), int(rng.integers(0, len(sources[t]))), 0
        )
        mixture = mix_at_offset(sources[t], sources[i], spec)
        assert abs(mixture.realized_sir_db - spec.sir_db) < 0.1


def test_mix_rejects_other_sample_rates():
    with pytest.raises(r.ParameterError):
        mix_at_offset(AudioClip(np.ones(400), 16000), tone(300.0), MixtureSpec('a/t', 'b/i', 0.0, 0, 0))


def test_labeled_mixture_checks_label_count():
    with pytest.raises(r.ShapeError):
        LabeledMixture(AudioClip(np.zeros(400)), np.zeros(5, dtype=bool), FrameGrid(), 0.0)


def test_silent_interferer_labels_every_frame_single():
    target = tone(440.0, seconds=1.0)
    labels = label_frames(target, AudioClip(np.zeros(8000)), FrameGrid())
    assert labels.shape == (98,)
    assert not labels.any()
    with pytest.raises(r.ShapeError):
        label_frames(target, AudioClip(np.zeros(7999)), FrameGrid())


def test_gated_bursts_label_the_intersection():
    n = np.arange(8000)
    target = AudioClip(tone(440.0, seconds=1.0).samples * (n < 4000))
    interferer = AudioClip(tone(500.0, seconds=1.0).samples * ((n >= 2400) & (n < 6400)))
    labels = label_frames(target, interferer, FrameGrid())
    # frame i spans [80 i, 80 i + 200): 28 is the first to reach 2400, 49 the last to start before 4000
    np.testing.assert_array_equal(np.flatnonzero(labels), np.arange(28, 50))
    assert labels_to_text(labels) == 'S' * 28 + 'O' * 22 + 'S' * 48


def test_removing_the_interferer_restores_the_target():
    target = tone(440.0, seconds=1.0, amplitude=0.9)
    interferer = tone(445.0, seconds=0.5, amplitude=0.9)
    mixture = mix_at_offset(target, interferer, MixtureSpec('a/t', 'b/i', 0.0, 6000, 0))
    assert mixture.rescale_factor < 1.0
    restored = mixture.clip.samples / mixture.rescale_factor
    np.testing.assert_allclose(restored[:6000], target.samples[:6000], rtol=0, atol=1e-12)
    overlap = restored[6000:8000] - mixture.gain * interferer.samples[:2000]
    np.testing.assert_allclose(overlap, target.samples[6000:], rtol=0, atol=1e-12)
    np.testing.assert_allclose(restored[8000:], mixture.gain * interferer.samples[2000:], rtol=0, atol=1e-12)
