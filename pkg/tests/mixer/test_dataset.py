#!/usr/bin/env python


""" Unit tests for cochannel._mixer.dataset. """

import logging

import numpy as np
import pytest

import cochannel as r
from cochannel import (
    AudioClip,
    Corpus,
    DatasetManifest,
    FrameGrid,
    Gender,
    ManifestEntry,
    MixtureSpec,
    Pairing,
    SyntheticCorpus,
    Utterance,
    generate_dataset,
    mix_at_offset,
    partition_speakers,
    read_labels,
    read_wav,
    render_dataset,
    write_manifest,
)
from cochannel._mixer.dataset import draw_spec, redraw_offset
from cochannel._mixer.mixing import speaker_of
from cochannel._utils.seeds import derive_seed

from .. import tone, tone_corpus

log = logging.getLogger('cochannel')
original_logging_level = logging.NOTSET


def setup_module():
    global original_logging_level
    original_logging_level = log.level
    log.setLevel(logging.DEBUG)


def teardown_module():
    if original_logging_level != logging.NOTSET:
        log.setLevel(original_logging_level)


@pytest.fixture
def corpus():
    return SyntheticCorpus(n_speakers=6, utterances_per_speaker=10, seed=1)


def test_partition_is_disjoint(corpus):
    partition = partition_speakers(corpus, seed=3)
    assert partition['train'] == partition['dev']
    assert not partition['test'] & partition['train']
    assert partition['test'] | partition['train'] == set(corpus.speakers)
    assert len(partition['test']) == 2
    assert {corpus.genders[name] for name in partition['test']} == {Gender.Male, Gender.Female}
    assert partition == partition_speakers(corpus, seed=3)


def test_partition_needs_four_speakers():
    with pytest.raises(r.CapacityError):
        partition_speakers(SyntheticCorpus(n_speakers=3, utterances_per_speaker=2), seed=0)


def test_partition_for_gendered_pairings(small_corpus):
    partition = partition_speakers(small_corpus, seed=0, pairing=Pairing.MaleFemale)
    test_genders = sorted(small_corpus.genders[name].value for name in partition['test'])
    assert test_genders == ['female', 'male']
    with pytest.raises(r.CapacityError):
        partition_speakers(small_corpus, seed=0, pairing=Pairing.MaleMale)


def test_draw_spec_sir_distribution():
    target = Utterance('a/t', 'a', 16000, lambda: None)
    interferers = [Utterance('b/%d' % i, 'b', 12000, lambda: None) for i in range(3)]
    specs = [draw_spec(target, interferers, derive_seed(0, 'mixture', i)) for i in range(10000)]
    sirs = np.array([spec.sir_db for spec in specs])
    assert sirs.min() >= 0.0
    assert sirs.max() <= 5.0
    assert 2.3 <= sirs.mean() <= 2.7
    assert all(0 <= spec.offset_samples < 16000 for spec in specs)
    assert {spec.interferer_utterance for spec in specs} == {'b/0', 'b/1', 'b/2'}
    with pytest.raises(r.CapacityError):
        draw_spec(target, [], 0)


def test_generate_dataset(corpus):
    manifest = generate_dataset(corpus, {'train': 20.0, 'dev': 5.0, 'test': 5.0}, seed=2)
    for split, budget in (('train', 20.0), ('dev', 5.0), ('test', 5.0)):
        entries = manifest.entries_for(split)
        assert entries
        planned = 0.0
        for entry in entries:
            target = corpus.utterance(entry.spec.target_utterance)
            interferer = corpus.utterance(entry.spec.interferer_utterance)
            assert speaker_of(target.key) != speaker_of(interferer.key)
            assert 0 <= entry.spec.offset_samples < target.num_samples
            assert 0.0 <= entry.spec.sir_db <= 5.0
            assert entry.rescale_factor is None
            planned += max(target.num_samples, entry.spec.offset_samples + interferer.num_samples)
        assert planned / 8000 >= budget
    shared = manifest.entries_for('train') + manifest.entries_for('dev')
    targets = [entry.spec.target_utterance for entry in shared]
    assert len(targets) == len(set(targets))
    assert manifest.entries[0].mix_path == 'mixtures/train/000000.wav'
    assert manifest.entries[1].label_path == 'labels/train/000001.lab'


def test_generate_dataset_is_deterministic(corpus, tmp_path):
    seconds = {'train': 10.0, 'dev': 3.0, 'test': 3.0}
    first = generate_dataset(corpus, seconds, seed=9)
    rebuilt = SyntheticCorpus(n_speakers=6, utterances_per_speaker=10, seed=1)
    second = generate_dataset(rebuilt, seconds, seed=9)
    assert first == second
    (tmp_path / 'a').mkdir()
    (tmp_path / 'b').mkdir()
    write_manifest(first, tmp_path / 'a' / 'manifest.jsonl')
    write_manifest(second, tmp_path / 'b' / 'manifest.jsonl')
    for name in ('manifest.jsonl', 'partition.json'):
        assert (tmp_path / 'a' / name).read_bytes() == (tmp_path / 'b' / name).read_bytes()
    assert generate_dataset(corpus, seconds, seed=10) != first


def test_generate_dataset_capacity(corpus):
    with pytest.raises(r.CapacityError):
        generate_dataset(corpus, {'train': 1000.0, 'dev': 1.0, 'test': 1.0}, seed=0)
    with pytest.raises(r.ParameterError):
        generate_dataset(corpus, {'train': -1.0}, seed=0)
    with pytest.raises(r.ParameterError):
        generate_dataset(corpus, {'validation': 1.0}, seed=0)


def test_male_female_pairing(corpus):
    seconds = {'train': 10.0, 'dev': 3.0, 'test': 3.0}
    manifest = generate_dataset(corpus, seconds, seed=4, pairing=Pairing.MaleFemale)
    for entry in manifest:
        target = corpus.genders[speaker_of(entry.spec.target_utterance)]
        interferer = corpus.genders[speaker_of(entry.spec.interferer_utterance)]
        assert target is not interferer


def test_render_dataset(small_corpus, tmp_path):
    manifest = generate_dataset(small_corpus, {'train': 4.0, 'dev': 2.0, 'test': 2.0}, seed=0)
    rendered = render_dataset(manifest, small_corpus, tmp_path, workers=2)
    assert len(rendered) == len(manifest)
    grid = FrameGrid()
    for planned, entry in zip(manifest, rendered):
        assert entry.spec == planned.spec
        assert 0.0 < entry.rescale_factor <= 1.0
        clip = read_wav(tmp_path / entry.mix_path)
        labels = read_labels(tmp_path / entry.label_path)
        assert len(labels) == grid.num_frames(len(clip))
        assert np.max(np.abs(clip.samples)) <= 1.0


def test_render_reports_failures_after_writing_the_rest(tmp_path):
    corpus = tone_corpus({'a': [300.0], 'b': [500.0]})

    def broken():
        raise r.AudioFormatError("unreadable")

    speakers = dict(corpus.speakers)
    speakers['a'] = speakers['a'] + [Utterance('a/bad', 'a', 4000, broken)]
    corpus = Corpus(speakers)
    partition = {'train': frozenset({'a', 'b'}), 'dev': frozenset({'a', 'b'}), 'test': frozenset()}
    broken_spec = MixtureSpec('a/bad', 'b/u0', 1.0, 0, 0)
    good_spec = MixtureSpec('a/u0', 'b/u0', 1.0, 100, 0)
    manifest = DatasetManifest(
        [
            ManifestEntry('mixtures/train/000000.wav', 'labels/train/000000.lab', 'train', broken_spec),
            ManifestEntry('mixtures/train/000001.wav', 'labels/train/000001.lab', 'train', good_spec),
        ],
        partition,
    )
    with pytest.raises(r.DataError):
        render_dataset(manifest, corpus, tmp_path, workers=2)
    assert not (tmp_path / 'mixtures/train/000000.wav').exists()
    assert (tmp_path / 'mixtures/train/000001.wav').exists()
    assert (tmp_path / 'labels/train/000001.lab').exists()


def test_render_moves_a_silent_overlap(tmp_path):
    voiced = tone(300.0, 0.1)
    target = AudioClip(np.concatenate([voiced.samples, np.zeros(7200)]))
    interferer = tone(500.0, 0.5)
    corpus = Corpus(
        {
            'a': [Utterance('a/tail', 'a', len(target), lambda: target)],
            'b': [Utterance('b/u0', 'b', len(interferer), lambda: interferer)],
        }
    )
    spec = MixtureSpec('a/tail', 'b/u0', 2.0, 6000, 17)
    with pytest.raises(r.DegenerateSourceError):
        mix_at_offset(target, interferer, spec)

    partition = {'train': frozenset({'a', 'b'}), 'dev': frozenset({'a', 'b'}), 'test': frozenset()}
    entry = ManifestEntry('mixtures/train/000000.wav', 'labels/train/000000.lab', 'train', spec)
    rendered = render_dataset(DatasetManifest([entry], partition), corpus, tmp_path / 'one', workers=1)
    moved = rendered.entries[0].spec
    assert 0 < moved.offset_samples < 800
    assert moved._replace(offset_samples=6000) == spec
    assert redraw_offset(spec, target, 0) == moved
    labels = read_labels(tmp_path / 'one' / entry.label_path)
    assert labels.any()

    again = render_dataset(DatasetManifest([entry], partition), corpus, tmp_path / 'two', workers=1)
    assert again == rendered
    with pytest.raises(r.DegenerateSourceError):
        redraw_offset(spec, AudioClip(np.zeros(800)), 0)
