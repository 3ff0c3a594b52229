""" cochannel: co-channel speech detection toolkit

    Run configuration: a JSON document merged with command-line overrides and
    validated in full before any work starts.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import json
import os
from typing import Any, Dict, Mapping, NamedTuple, Optional, Tuple

from ._audio import FrameGrid, PathType
from ._cnn.training import TrainConfig
from ._exceptions import ConfigError
from ._features import FeatureKind
from ._mixer.dataset import Pairing
from .const import (
    _BATCH_SIZE,
    _CHANNEL_PLAN,
    _EPOCHS,
    _FRAME_LEN,
    _HOP,
    _LEARNING_RATE,
    _LR_FACTOR,
    _PLATEAU_PATIENCE,
    _SPLITS,
    _THRESHOLD,
    _VAD_THRESHOLD_DB,
)

SYNTHETIC = 'synthetic'

_DEFAULT_MINUTES = {'train': 4.0, 'dev': 1.0, 'test': 1.0}
_TOP_LEVEL_KEYS = frozenset(
    (
        'corpus',
        'minutes',
        'feature',
        'frame_len',
        'hop',
        'seed',
        'out',
        'workers',
        'pairing',
        'vad_threshold_db',
        'synthetic',
        'train',
        'threshold',
    )
)
_SYNTHETIC_KEYS = frozenset(('speakers', 'utterances_per_speaker'))
_TRAIN_KEYS = frozenset(
    ('epochs', 'batch_size', 'learning_rate', 'plateau_patience', 'lr_factor', 'channels')
)


class RunConfig(NamedTuple):
    corpus: str = SYNTHETIC
    minutes: Tuple[Tuple[str, float], ...] = tuple(_DEFAULT_MINUTES.items())
    feature: FeatureKind = FeatureKind.Pykno
    frame_len: int = _FRAME_LEN
    hop: int = _HOP
    seed: int = 0
    out: str = 'run'
    workers: Optional[int] = None
    pairing: Pairing = Pairing.Any
    vad_threshold_db: float = _VAD_THRESHOLD_DB
    speakers: int = 8
    utterances_per_speaker: int = 50
    train: TrainConfig = TrainConfig()
    channels: Tuple[int, ...] = _CHANNEL_PLAN
    threshold: float = _THRESHOLD

    @property
    def is_synthetic(self) -> bool:
        return self.corpus == SYNTHETIC

    @property
    def grid(self) -> FrameGrid:
        return FrameGrid(self.frame_len, self.hop)

    def split_seconds(self) -> Dict[str, float]:
        return {split: minutes * 60.0 for split, minutes in self.minutes}

    @property
    def dataset_dir(self) -> str:
        return os.path.join(self.out, 'dataset')

    @property
    def manifest_path(self) -> str:
        return os.path.join(self.dataset_dir, 'manifest.jsonl')

    def feature_dir(self, kind: Optional[FeatureKind] = None) -> str:
        return os.path.join(self.out, 'features', (kind or self.feature).value)

    def model_dir(self, kind: Optional[FeatureKind] = None) -> str:
        return os.path.join(self.out, 'models', (kind or self.feature).value)


def _integer(value: Any, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError("%s must be an integer, got %r" % (name, value))
    if value < minimum:
        raise ConfigError("%s must be at least %d, got %d" % (name, minimum, value))
    return value


def _number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("%s must be a number, got %r" % (name, value))
    return float(value)


def _section(document: Mapping[str, Any], name: str, allowed: frozenset) -> Mapping[str, Any]:
    section = document.get(name, {})
    if not isinstance(section, Mapping):
        raise ConfigError("'%s' must be an object, got %r" % (name, section))
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError("Unknown keys in '%s': %s" % (name, ', '.join(unknown)))
    return section


def parse_minutes(value: Any) -> Tuple[Tuple[str, float], ...]:
    """Accept ``{"train": 2, "dev": 1, "test": 1}`` or the command-line form ``2/1/1``."""
    if isinstance(value, str):
        parts = value.split('/')
        if len(parts) != len(_SPLITS):
            raise ConfigError("minutes must look like train/dev/test, got %r" % value)
        try:
            value = dict(zip(_SPLITS, (float(part) for part in parts)))
        except ValueError as exc:
            raise ConfigError("minutes must be numbers, got %r" % value) from exc
    if not isinstance(value, Mapping):
        raise ConfigError("minutes must be an object keyed by split, got %r" % (value,))
    unknown = sorted(set(value) - set(_SPLITS))
    if unknown:
        raise ConfigError("Unknown splits in minutes: %s" % ', '.join(unknown))
    minutes = []
    for split in _SPLITS:
        amount = _number(value.get(split, 0.0), 'minutes.%s' % split)
        if amount < 0:
            raise ConfigError("minutes.%s must not be negative, got %s" % (split, amount))
        minutes.append((split, amount))
    if not minutes[0][1] or not minutes[1][1]:
        raise ConfigError("The train and dev splits need a positive duration")
    return tuple(minutes)


def _channels(value: Any) -> Tuple[int, ...]:
    if not isinstance(value, (list, tuple)) or len(value) != len(_CHANNEL_PLAN):
        raise ConfigError("train.channels must list %d channel counts, got %r" % (len(_CHANNEL_PLAN), value))
    channels = tuple(_integer(c, 'train.channels', 1) for c in value)
    if channels[0] != 1:
        raise ConfigError("train.channels must start with a single input channel, got %d" % channels[0])
    return channels


def build_config(
    document: Optional[Mapping[str, Any]] = None, **overrides: Any
) -> RunConfig:
    """Validate a config document, with non-None ``overrides`` taking precedence.

    Each rule raises :class:`ConfigError` naming the offending key.
    """
    if document is not None and not isinstance(document, Mapping):
        raise ConfigError("The config must be a JSON object")
    document = dict(document or {})
    unknown = sorted(set(document) - _TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigError("Unknown config keys: %s" % ', '.join(unknown))
    document.update({key: value for key, value in overrides.items() if value is not None})

    corpus = document.get('corpus', SYNTHETIC)
    if not isinstance(corpus, str) or not corpus:
        raise ConfigError("corpus must be 'synthetic' or a directory, got %r" % (corpus,))
    if corpus != SYNTHETIC and not os.path.isdir(corpus):
        raise ConfigError("Corpus directory %s does not exist" % corpus)

    try:
        feature = FeatureKind(document.get('feature', FeatureKind.Pykno.value))
    except ValueError as exc:
        names = '|'.join(kind.value for kind in FeatureKind)
        raise ConfigError("feature must be one of %s, got %r" % (names, document['feature'])) from exc
    try:
        pairing = Pairing(document.get('pairing', Pairing.Any.value))
    except ValueError as exc:
        names = '|'.join(p.value for p in Pairing)
        raise ConfigError("pairing must be one of %s, got %r" % (names, document['pairing'])) from exc

    frame_len = _integer(document.get('frame_len', _FRAME_LEN), 'frame_len', 1)
    hop = _integer(document.get('hop', _HOP), 'hop', 1)
    if hop > frame_len:
        raise ConfigError("hop (%d) must not exceed frame_len (%d)" % (hop, frame_len))

    workers = document.get('workers')
    if workers is not None:
        workers = _integer(workers, 'workers', 1)
    out = document.get('out', 'run')
    if not isinstance(out, str) or not out:
        raise ConfigError("out must be a directory path, got %r" % (out,))
    threshold = _number(document.get('threshold', _THRESHOLD), 'threshold')
    if not 0.0 <= threshold <= 1.0:
        raise ConfigError("threshold must lie in [0, 1], got %s" % threshold)

    synthetic = _section(document, 'synthetic', _SYNTHETIC_KEYS)
    train = _section(document, 'train', _TRAIN_KEYS)
    seed = _integer(document.get('seed', 0), 'seed', 0)
    train_config = TrainConfig(
        epochs=_integer(train.get('epochs', _EPOCHS), 'train.epochs', 0),
        batch_size=_integer(train.get('batch_size', _BATCH_SIZE), 'train.batch_size', 1),
        learning_rate=_number(train.get('learning_rate', _LEARNING_RATE), 'train.learning_rate'),
        plateau_patience=_integer(
            train.get('plateau_patience', _PLATEAU_PATIENCE), 'train.plateau_patience', 1
        ),
        lr_factor=_number(train.get('lr_factor', _LR_FACTOR), 'train.lr_factor'),
        seed=seed,
    )
    if train_config.learning_rate <= 0:
        raise ConfigError("train.learning_rate must be positive, got %s" % train_config.learning_rate)
    if not 0.0 < train_config.lr_factor < 1.0:
        raise ConfigError("train.lr_factor must lie in (0, 1), got %s" % train_config.lr_factor)

    return RunConfig(
        corpus=corpus,
        minutes=parse_minutes(document.get('minutes', _DEFAULT_MINUTES)),
        feature=feature,
        frame_len=frame_len,
        hop=hop,
        seed=seed,
        out=out,
        workers=workers,
        pairing=pairing,
        vad_threshold_db=_number(document.get('vad_threshold_db', _VAD_THRESHOLD_DB), 'vad_threshold_db'),
        speakers=_integer(synthetic.get('speakers', 8), 'synthetic.speakers', 1),
        utterances_per_speaker=_integer(
            synthetic.get('utterances_per_speaker', 50), 'synthetic.utterances_per_speaker', 1
        ),
        train=train_config,
        channels=_channels(train.get('channels', list(_CHANNEL_PLAN))),
        threshold=threshold,
    )


def load_config(path: Optional[PathType] = None, **overrides: Any) -> RunConfig:
    document: Dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, encoding='utf-8') as f:
                document = json.load(f)
        except OSError as exc:
            raise ConfigError("Cannot read config %s: %s" % (path, exc)) from exc
        except ValueError as exc:
            raise ConfigError("Config %s is not valid JSON: %s" % (path, exc)) from exc
        if not isinstance(document, dict):
            raise ConfigError("Config %s must hold a JSON object" % path)
    return build_config(document, **overrides)
