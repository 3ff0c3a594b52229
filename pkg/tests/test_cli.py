#!/usr/bin/env python


""" Unit tests for the cochannel command line. """

import json
import logging
import os

import numpy as np
import pytest

from cochannel import FeatureKind, read_checkpoint, read_features, read_labels, read_manifest
from cochannel._cli import main
from cochannel._cnn.training import read_trace_csv
from cochannel._features.normalizer import Normalizer
from cochannel._metrics import read_report

from . import TINY_CHANNELS

log = logging.getLogger('cochannel')
original_logging_level = logging.NOTSET


def setup_module():
    global original_logging_level
    original_logging_level = log.level
    log.setLevel(logging.DEBUG)


def teardown_module():
    if original_logging_level != logging.NOTSET:
        log.setLevel(original_logging_level)


def _write_config(path, epochs):
    document = {
        'seed': 11,
        'minutes': {'train': 0.2, 'dev': 0.1, 'test': 0.1},
        'synthetic': {'speakers': 4, 'utterances_per_speaker': 6},
        'train': {'epochs': epochs, 'batch_size': 64, 'channels': list(TINY_CHANNELS)},
        'workers': 2,
    }
    path.write_text(json.dumps(document))
    return str(path)


@pytest.fixture(scope='module')
def prepared_run(tmp_path_factory):
    """A synthesised and featurized run directory with tiny splits."""
    root = tmp_path_factory.mktemp('cli')
    out = str(root / 'run')
    config = _write_config(root / 'run.json', epochs=3)
    assert main(['synth', '--config', config, '--out', out, '--mode', 'synthetic']) == 0
    assert main(['featurize', '--config', config, '--out', out, '--feature', 'mfb']) == 0
    return root, out


def test_synth_and_featurize_outputs(prepared_run):
    _, out = prepared_run
    dataset = os.path.join(out, 'dataset')
    manifest = read_manifest(os.path.join(dataset, 'manifest.jsonl'))
    assert all(manifest.entries_for(split) for split in ('train', 'dev', 'test'))
    assert all(entry.rescale_factor is not None for entry in manifest)
    for entry in manifest:
        labels = read_labels(os.path.join(dataset, entry.label_path))
        stem = os.path.splitext(os.path.basename(entry.mix_path))[0]
        fm = read_features(os.path.join(out, 'features', 'mfb', entry.split, stem + '.ftr'), FeatureKind.MFB)
        assert fm.num_frames == len(labels)
        assert os.path.exists(os.path.join(dataset, entry.mix_path))
    norm = Normalizer.load(os.path.join(out, 'features', 'mfb', 'normalizer.json'))
    assert norm.kind is FeatureKind.MFB
    assert norm.mean.shape == (40,)


def test_train_resume_and_eval(prepared_run, capsys):
    root, out = prepared_run
    three = _write_config(root / 'three.json', epochs=3)
    two = _write_config(root / 'two.json', epochs=2)
    model_dir = os.path.join(out, 'models', 'mfb')
    common = ['--out', out, '--feature', 'mfb']

    assert main(['train', '--config', three] + common) == 0
    straight = read_trace_csv(os.path.join(model_dir, 'trace.csv'))
    straight_best = read_checkpoint(os.path.join(model_dir, 'model.ckpt'))
    assert [row.epoch for row in straight] == [1, 2, 3]
    assert straight_best.state.epoch == 3

    assert main(['train', '--config', two] + common) == 0
    assert len(read_trace_csv(os.path.join(model_dir, 'trace.csv'))) == 2
    assert read_checkpoint(os.path.join(model_dir, 'last.ckpt')).state.epoch == 2

    assert main(['train', '--config', three, '--resume'] + common) == 0
    resumed = read_trace_csv(os.path.join(model_dir, 'trace.csv'))
    assert [row[:4] for row in resumed] == [row[:4] for row in straight]
    assert read_checkpoint(os.path.join(model_dir, 'model.ckpt')).model == straight_best.model

    capsys.readouterr()
    assert main(['eval', '--config', three, '--threshold', '0.5'] + common) == 0
    printed = dict(line.split('=', 1) for line in capsys.readouterr().out.splitlines())
    assert printed['threshold'] == '0.500000'
    assert 0.0 <= float(printed['accuracy']) <= 1.0
    report = read_report(os.path.join(out, 'eval', 'mfb', 'report.txt'))
    assert report['accuracy'] == printed['accuracy']
    counts = [int(report[key]) for key in ('tp', 'fp', 'fn', 'tn')]
    assert sum(counts) == int(report['frames'])
    if report['auc'] != 'undefined':
        assert os.path.exists(os.path.join(out, 'eval', 'mfb', 'roc.csv'))

    # a checkpoint trained on mfb cannot score mfcc features
    assert main(['featurize', '--config', three, '--out', out, '--feature', 'mfcc']) == 0
    best = os.path.join(model_dir, 'model.ckpt')
    assert main(['eval', '--config', three, '--out', out, '--feature', 'mfcc', '--checkpoint', best]) == 4
    assert main(['train', '--config', three, '--out', out, '--feature', 'mfcc', '--resume', best]) == 4


def test_config_errors_exit_2(tmp_path):
    out = str(tmp_path / 'run')
    assert main(['synth', '--out', out, '--minutes', '2/1']) == 2
    assert main(['synth', '--out', out, '--mode', 'corpus']) == 2
    assert main(['synth', '--out', out, '--mode', 'synthetic', '--corpus', str(tmp_path)]) == 2
    assert main(['synth', '--out', out, '--corpus', str(tmp_path / 'missing')]) == 2
    assert main(['synth', '--out', out, '--config', str(tmp_path / 'missing.json')]) == 2
    assert main(['eval', '--out', out, '--threshold', '1.5']) == 2
    assert main(['train', '--out', out, '--workers', '0']) == 2
    assert not os.path.exists(out)


def test_missing_inputs_exit_3(tmp_path):
    out = str(tmp_path / 'run')
    assert main(['featurize', '--out', out]) == 3
    assert main(['train', '--out', out]) == 3
    assert main(['eval', '--out', out]) == 3


def test_capacity_errors_exit_3(tmp_path):
    config = tmp_path / 'run.json'
    config.write_text(json.dumps({'synthetic': {'speakers': 4, 'utterances_per_speaker': 1}}))
    assert main(['synth', '--config', str(config), '--out', str(tmp_path / 'run'), '--minutes', '5/1/1']) == 3


def test_pairing_needs_genders(tmp_path):
    config = tmp_path / 'run.json'
    config.write_text(
        json.dumps(
            {
                'minutes': {'train': 0.1, 'dev': 0.05, 'test': 0.05},
                'synthetic': {'speakers': 4, 'utterances_per_speaker': 4},
            }
        )
    )
    out = str(tmp_path / 'run')
    assert main(['synth', '--config', str(config), '--out', out, '--pairing', 'male-female']) == 0
    manifest = read_manifest(os.path.join(out, 'dataset', 'manifest.jsonl'))
    assert manifest.speaker_partition['test']
    assert main(['synth', '--config', str(config), '--out', out, '--pairing', 'male-male']) == 3


@pytest.mark.slow
@pytest.mark.timeout(3600)
def test_toy_end_to_end_learning(tmp_path, capsys):
    """Pyknogram features and the full classifier separate overlap from single talk."""
    config = tmp_path / 'run.json'
    config.write_text(
        json.dumps(
            {
                'seed': 1,
                'feature': 'pykno',
                'minutes': {'train': 4, 'dev': 1, 'test': 1},
                'train': {'epochs': 20},
            }
        )
    )
    args = ['--config', str(config), '--out', str(tmp_path / 'run')]
    for command in ('synth', 'featurize', 'train'):
        assert main([command] + args) == 0
    trace = read_trace_csv(str(tmp_path / 'run' / 'models' / 'pykno' / 'trace.csv'))
    assert np.all(np.diff([row.train_loss for row in trace[:10]]) < 0)

    capsys.readouterr()
    assert main(['eval'] + args) == 0
    printed = dict(line.split('=', 1) for line in capsys.readouterr().out.splitlines())
    assert float(printed['accuracy']) >= 0.90
    assert float(printed['fscore']) >= 0.90
