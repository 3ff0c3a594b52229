#!/usr/bin/env python


""" Unit tests for cochannel.config. """

import json
import os

import pytest

import cochannel as r
from cochannel import FeatureKind, FrameGrid, Pairing, build_config, load_config
from cochannel.config import SYNTHETIC, parse_minutes


def test_defaults():
    config = build_config()
    assert config.is_synthetic
    assert config.corpus == SYNTHETIC
    assert config.split_seconds() == {'train': 240.0, 'dev': 60.0, 'test': 60.0}
    assert config.feature is FeatureKind.Pykno
    assert config.grid == FrameGrid(200, 80)
    assert config.pairing is Pairing.Any
    assert config.channels == (1, 128, 128, 128, 128, 128, 32)
    assert config.train.epochs == 200
    assert config.train.batch_size == 32
    assert config.train.learning_rate == 0.001
    assert config.threshold == 0.5
    assert config.workers is None


def test_run_layout():
    config = build_config({'out': 'runs/a', 'feature': 'mfb'})
    assert config.manifest_path == os.path.join('runs/a', 'dataset', 'manifest.jsonl')
    assert config.feature_dir() == os.path.join('runs/a', 'features', 'mfb')
    assert config.feature_dir(FeatureKind.MFCC) == os.path.join('runs/a', 'features', 'mfcc')
    assert config.model_dir() == os.path.join('runs/a', 'models', 'mfb')


def test_document_and_overrides():
    document = {
        'seed': 3,
        'feature': 'mfcc',
        'pairing': 'male-female',
        'minutes': {'train': 0.5, 'dev': 0.25},
        'synthetic': {'speakers': 6, 'utterances_per_speaker': 4},
        'train': {'epochs': 2, 'batch_size': 8, 'channels': [1, 4, 4, 4, 4, 4, 3]},
    }
    config = build_config(document, seed=9, feature=None, threshold=0.3)
    assert config.seed == 9
    assert config.train.seed == 9
    assert config.feature is FeatureKind.MFCC
    assert config.pairing is Pairing.MaleFemale
    assert config.split_seconds() == {'train': 30.0, 'dev': 15.0, 'test': 0.0}
    assert (config.speakers, config.utterances_per_speaker) == (6, 4)
    assert (config.train.epochs, config.train.batch_size) == (2, 8)
    assert config.channels == (1, 4, 4, 4, 4, 4, 3)
    assert config.threshold == 0.3
    assert document['seed'] == 3


@pytest.mark.parametrize(
    'document',
    [
        {'colour': 'blue'},
        {'train': {'momentum': 0.9}},
        {'synthetic': {'voices': 3}},
        {'train': []},
        {'feature': 'spectrogram'},
        {'pairing': 'child-child'},
        {'frame_len': 80, 'hop': 200},
        {'hop': 0},
        {'frame_len': 200.0},
        {'seed': True},
        {'seed': -1},
        {'workers': 0},
        {'out': ''},
        {'threshold': 1.5},
        {'threshold': 'high'},
        {'train': {'learning_rate': 0}},
        {'train': {'lr_factor': 1.0}},
        {'train': {'plateau_patience': 0}},
        {'train': {'epochs': -1}},
        {'train': {'channels': [1, 4, 4]}},
        {'train': {'channels': [2, 4, 4, 4, 4, 4, 3]}},
        {'synthetic': {'speakers': 0}},
        {'corpus': ''},
    ],
)
def test_invalid_documents(document):
    with pytest.raises(r.ConfigError):
        build_config(document)


def test_invalid_overrides():
    with pytest.raises(r.ConfigError):
        build_config(None, feature='bogus')
    with pytest.raises(r.ConfigError):
        build_config([1, 2])


def test_corpus_directory_must_exist(tmp_path):
    assert build_config({'corpus': str(tmp_path)}).corpus == str(tmp_path)
    assert not build_config({'corpus': str(tmp_path)}).is_synthetic
    with pytest.raises(r.ConfigError):
        build_config({'corpus': str(tmp_path / 'missing')})


def test_parse_minutes():
    assert parse_minutes('2/1/1') == (('train', 2.0), ('dev', 1.0), ('test', 1.0))
    assert parse_minutes('0.5/0.5/0') == (('train', 0.5), ('dev', 0.5), ('test', 0.0))
    assert parse_minutes({'train': 3, 'dev': 1}) == (('train', 3.0), ('dev', 1.0), ('test', 0.0))
    for bad in ('2/1', '2/1/1/1', 'a/1/1', '0/1/1', '1/0/1', '1/1/-1', {'train': 1, 'eval': 1}, [1, 1, 1]):
        with pytest.raises(r.ConfigError):
            parse_minutes(bad)


def test_load_config(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'seed': 4, 'minutes': '1/1/1'}))
    config = load_config(path, out=str(tmp_path / 'run'))
    assert config.seed == 4
    assert config.out == str(tmp_path / 'run')
    assert load_config().seed == 0

    with pytest.raises(r.ConfigError):
        load_config(tmp_path / 'missing.json')
    path.write_text('{"seed": ')
    with pytest.raises(r.ConfigError):
        load_config(path)
    path.write_text('[1, 2, 3]')
    with pytest.raises(r.ConfigError):
        load_config(path)
