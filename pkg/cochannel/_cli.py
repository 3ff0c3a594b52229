""" cochannel: co-channel speech detection toolkit

    Command-line pipeline: synth -> featurize -> train -> eval.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ._audio import read_wav
from ._cnn.model import Model, check_input_kind
from ._cnn.training import (
    FrameDataset,
    TraceRow,
    TrainingState,
    predict,
    read_trace_csv,
    train,
    write_trace_csv,
)
from ._exceptions import CompatibilityError, ConfigError, DataError, Error, UndefinedMetricError
from ._features import FeatureKind, FeatureMatrix
from ._features.extractor import FeatureExtractor
from ._features.normalizer import Normalizer, apply_normalizer, fit_normalizer
from ._logger import QuietLogger, log
from ._metrics import (
    CurvePoint,
    ReportValue,
    average_precision,
    confusion,
    pr_curve,
    roc_curve,
    summary,
    write_curve_csv,
    write_report,
)
from ._mixer.corpus import Corpus, SyntheticCorpus, WavCorpus
from ._mixer.dataset import DatasetManifest, ManifestEntry, generate_dataset, render_dataset
from ._protocol.checkpoint import load_checkpoint, read_checkpoint, save_checkpoint
from ._protocol.features import read_features, write_features
from ._protocol.labels import read_labels
from ._protocol.manifest import read_manifest, write_manifest
from ._utils.time import Stopwatch
from .config import SYNTHETIC, RunConfig, load_config
from .const import (
    _EXIT_COMPATIBILITY,
    _EXIT_CONFIG,
    _EXIT_DATA,
    _EXIT_OK,
    _SPLIT_DEV,
    _SPLIT_TEST,
    _SPLIT_TRAIN,
)

NORMALIZER_FILE = 'normalizer.json'
BEST_CHECKPOINT = 'model.ckpt'
LAST_CHECKPOINT = 'last.ckpt'
TRACE_FILE = 'trace.csv'
REPORT_FILE = 'report.txt'


def _open_corpus(config: RunConfig) -> Corpus:
    if config.is_synthetic:
        return SyntheticCorpus(config.speakers, config.utterances_per_speaker, config.seed)
    return WavCorpus(config.corpus)


def cmd_synth(config: RunConfig) -> DatasetManifest:
    """Plan and render the mixtures, then write the manifest."""
    corpus = _open_corpus(config)
    manifest = generate_dataset(corpus, config.split_seconds(), config.seed, config.pairing)
    manifest = render_dataset(
        manifest, corpus, config.dataset_dir, config.workers, config.grid, config.vad_threshold_db
    )
    write_manifest(manifest, config.manifest_path)
    log.info('Wrote %r to %s', manifest, config.manifest_path)
    return manifest


def feature_path(config: RunConfig, entry: ManifestEntry, kind: Optional[FeatureKind] = None) -> str:
    stem = os.path.splitext(os.path.basename(entry.mix_path))[0]
    return os.path.join(config.feature_dir(kind), entry.split, stem + '.ftr')


def _featurize_entry(config: RunConfig, extractor: FeatureExtractor, entry: ManifestEntry) -> str:
    clip = read_wav(os.path.join(config.dataset_dir, entry.mix_path))
    fm = extractor(clip)
    labels = read_labels(os.path.join(config.dataset_dir, entry.label_path))
    if fm.num_frames != len(labels):
        raise DataError(
            "%s yields %d feature frames but has %d labels" % (entry.mix_path, fm.num_frames, len(labels))
        )
    path = feature_path(config, entry)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    write_features(fm, path)
    return path


def cmd_featurize(config: RunConfig) -> Normalizer:
    """Write one feature file per mixture and fit the normalizer on the train split."""
    manifest = read_manifest(config.manifest_path)
    extractor = FeatureExtractor(config.feature, config.grid)
    failures: List[str] = []
    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        futures = [executor.submit(_featurize_entry, config, extractor, entry) for entry in manifest]
        for entry, future in zip(manifest, futures):
            try:
                future.result()
            except (DataError, OSError) as exc:
                QuietLogger.log_exception_once(exc, 'Failed to featurize %s: %s', entry.mix_path, exc)
                failures.append(entry.mix_path)
    if failures:
        raise DataError(
            "%d of %d mixtures failed feature extraction, first: %s"
            % (len(failures), len(manifest), failures[0])
        )
    train_paths = [feature_path(config, entry) for entry in manifest.entries_for(_SPLIT_TRAIN)]
    norm = fit_normalizer(read_features(path, config.feature) for path in train_paths)
    norm.save(os.path.join(config.feature_dir(), NORMALIZER_FILE))
    log.info('Extracted %s features for %d mixtures', config.feature.value, len(manifest))
    return norm


def load_split(config: RunConfig, manifest: DatasetManifest, split: str, norm: Normalizer) -> FrameDataset:
    """Normalised frames and labels of one split, concatenated in manifest order."""
    features = [np.zeros((0, config.feature.dim))]
    labels = [np.zeros(0)]
    for entry in manifest.entries_for(split):
        fm: FeatureMatrix = apply_normalizer(read_features(feature_path(config, entry), config.feature), norm)
        truth = read_labels(os.path.join(config.dataset_dir, entry.label_path))
        if len(truth) != fm.num_frames:
            raise DataError("%s has %d labels for %d frames" % (entry.label_path, len(truth), fm.num_frames))
        features.append(fm.data)
        labels.append(truth.astype(np.float64))
    return FrameDataset(np.concatenate(features), np.concatenate(labels))


def _load_normalizer(config: RunConfig) -> Normalizer:
    norm = Normalizer.load(os.path.join(config.feature_dir(), NORMALIZER_FILE))
    if norm.kind is not config.feature:
        raise CompatibilityError(
            "The normalizer was fit on %s, not %s" % (norm.kind.value, config.feature.value)
        )
    return norm


def cmd_train(config: RunConfig, resume: Optional[str] = None) -> List[TraceRow]:
    """Train on the train split, selecting on dev loss.

    ``resume`` names a checkpoint to continue from; '' means the last one.
    """
    manifest = read_manifest(config.manifest_path)
    norm = _load_normalizer(config)
    train_set = load_split(config, manifest, _SPLIT_TRAIN, norm)
    dev_set = load_split(config, manifest, _SPLIT_DEV, norm)
    model_dir = config.model_dir()
    os.makedirs(model_dir, exist_ok=True)
    trace_path = os.path.join(model_dir, TRACE_FILE)
    best_path = os.path.join(model_dir, BEST_CHECKPOINT)
    last_path = os.path.join(model_dir, LAST_CHECKPOINT)

    state: Optional[TrainingState] = None
    best_model: Optional[Model] = None
    if resume is not None:
        checkpoint = read_checkpoint(resume or last_path)
        if checkpoint.kind is not config.feature or checkpoint.input_dim != train_set.features.shape[1]:
            raise CompatibilityError(
                "Cannot resume a %s/%d checkpoint on %s/%d features"
                % (
                    checkpoint.kind.value,
                    checkpoint.input_dim,
                    config.feature.value,
                    train_set.features.shape[1],
                )
            )
        model, state = checkpoint.model, checkpoint.state
        if os.path.exists(best_path):
            best_model = load_checkpoint(best_path, config.feature, checkpoint.input_dim)
        history = read_trace_csv(trace_path) if os.path.exists(trace_path) else []
        history = [row for row in history if row.epoch <= state.epoch]
        write_trace_csv(history, trace_path)
        log.info('Resuming at epoch %d with lr %g', state.epoch, state.learning_rate)
    else:
        model = Model.initialize(config.channels, config.train.seed)
        check_input_kind(model, config.feature)
        write_trace_csv([], trace_path)

    def on_epoch(row: TraceRow, epoch_state: TrainingState, current: Model, best: Model) -> None:
        write_trace_csv([row], trace_path, append=True)
        save_checkpoint(current, last_path, config.feature, epoch_state)
        save_checkpoint(best, best_path, config.feature, epoch_state)

    best, trace = train(model, train_set, dev_set, config.train, state, best_model, on_epoch)
    if not trace:
        save_checkpoint(best, best_path, config.feature, state or TrainingState(config.train.learning_rate))
    return trace


def _curve_or_none(
    name: str,
    compute: Callable[[np.ndarray, np.ndarray], List[CurvePoint]],
    scores: np.ndarray,
    truth: np.ndarray,
) -> Optional[List[CurvePoint]]:
    try:
        return compute(scores, truth)
    except UndefinedMetricError as exc:
        log.warning('No %s curve: %s', name, exc)
        return None


def cmd_eval(config: RunConfig, checkpoint: Optional[str] = None) -> Dict[str, ReportValue]:
    """Score the test split and write the report with ROC and PR curves."""
    manifest = read_manifest(config.manifest_path)
    norm = _load_normalizer(config)
    test_set = load_split(config, manifest, _SPLIT_TEST, norm)
    model_dir = config.model_dir()
    model = load_checkpoint(
        checkpoint or os.path.join(model_dir, BEST_CHECKPOINT), config.feature, test_set.features.shape[1]
    )
    decisions, scores = predict(model, test_set.features, config.threshold)
    truth = test_set.labels.astype(bool)
    cm = confusion(decisions, truth)

    eval_dir = os.path.join(config.out, 'eval', config.feature.value)
    os.makedirs(eval_dir, exist_ok=True)
    roc = _curve_or_none('ROC', roc_curve, scores, truth)
    if roc is not None:
        write_curve_csv(roc, os.path.join(eval_dir, 'roc.csv'), 'roc')
    pr = _curve_or_none('precision-recall', pr_curve, scores, truth)
    if pr is not None:
        write_curve_csv(pr, os.path.join(eval_dir, 'pr.csv'), 'pr')

    trace_path = os.path.join(model_dir, TRACE_FILE)
    trace = read_trace_csv(trace_path) if os.path.exists(trace_path) else []
    mean_seconds = float(np.mean([row.seconds for row in trace])) if trace else None
    report = summary(cm, roc, mean_seconds)
    report['threshold'] = config.threshold
    report['average_precision'] = float(average_precision(scores, truth)) if pr is not None else 'undefined'
    write_report(report, os.path.join(eval_dir, REPORT_FILE))
    log.info('Evaluated %d test frames: %s', cm.total, report)
    return report


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', help='JSON run configuration')
    parser.add_argument('--seed', type=int, help='root seed')
    parser.add_argument('--feature', choices=[kind.value for kind in FeatureKind])
    parser.add_argument('--out', help='run directory')
    parser.add_argument('--workers', type=int, help='threads for per-file work')
    parser.add_argument('-v', '--verbose', action='store_true', help='log at debug level')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='cochannel', description='Co-channel speech detection pipeline')
    commands = parser.add_subparsers(dest='command', required=True)

    synth = commands.add_parser('synth', help='mix a labelled dataset')
    _add_common(synth)
    synth.add_argument('--mode', choices=['synthetic', 'corpus'], help='source of the speech')
    synth.add_argument('--corpus', help='corpus root holding <speaker>/*.wav')
    synth.add_argument('--minutes', help='train/dev/test minutes, for example 2/1/1')
    synth.add_argument('--pairing', help='any, male-male, female-female or male-female')

    featurize = commands.add_parser('featurize', help='extract features and fit the normalizer')
    _add_common(featurize)

    train_cmd = commands.add_parser('train', help='train the classifier')
    _add_common(train_cmd)
    train_cmd.add_argument(
        '--resume',
        nargs='?',
        const='',
        metavar='CHECKPOINT',
        help='continue from a checkpoint (default: last)',
    )

    evaluate = commands.add_parser('eval', help='score the test split')
    _add_common(evaluate)
    evaluate.add_argument('--threshold', type=float, help='overlap decision threshold')
    evaluate.add_argument('--checkpoint', help='checkpoint to evaluate (default: best)')
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    corpus = getattr(args, 'corpus', None)
    mode = getattr(args, 'mode', None)
    if mode == 'synthetic':
        if corpus is not None:
            raise ConfigError("--corpus cannot be combined with --mode synthetic")
        corpus = SYNTHETIC
    elif mode == 'corpus' and corpus is None:
        raise ConfigError("--mode corpus needs --corpus DIR")
    return load_config(
        args.config,
        corpus=corpus,
        seed=args.seed,
        feature=args.feature,
        out=args.out,
        workers=args.workers,
        minutes=getattr(args, 'minutes', None),
        pairing=getattr(args, 'pairing', None),
        threshold=getattr(args, 'threshold', None),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns the process exit code."""
    args = build_parser().parse_args(argv)
    stopwatch = Stopwatch()
    logging.basicConfig(format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    log.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    try:
        config = _config_from_args(args)
        if args.command == 'synth':
            cmd_synth(config)
        elif args.command == 'featurize':
            cmd_featurize(config)
        elif args.command == 'train':
            cmd_train(config, args.resume)
        else:
            for key, value in cmd_eval(config, args.checkpoint).items():
                print('%s=%s' % (key, '%.6f' % value if isinstance(value, float) else value))
    except ConfigError as exc:
        log.error('Configuration error: %s', exc)
        return _EXIT_CONFIG
    except CompatibilityError as exc:
        log.error('Incompatible inputs: %s', exc)
        return _EXIT_COMPATIBILITY
    except (Error, OSError) as exc:
        log.error('Data error: %s', exc)
        return _EXIT_DATA
    log.info('%s finished in %.1f s', args.command, stopwatch.total)
    return _EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
