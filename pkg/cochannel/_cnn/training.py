""" cochannel: co-channel speech detection toolkit

    Mini-batch SGD training with a plateau learning-rate schedule.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import csv
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .model import Model, backward, bce_loss, forward, forward_cached, sgd_step
from .._audio import PathType
from .._exceptions import EmptyDatasetError, ParameterError, ShapeError
from .._logger import log
from .._utils.seeds import make_rng
from .._utils.time import Stopwatch
from ..const import (
    _BATCH_SIZE,
    _EPOCHS,
    _LEARNING_RATE,
    _LR_FACTOR,
    _PLATEAU_PATIENCE,
    _PREDICT_CHUNK,
    _THRESHOLD,
)


class TrainConfig(NamedTuple):
    epochs: int = _EPOCHS
    batch_size: int = _BATCH_SIZE
    learning_rate: float = _LEARNING_RATE
    plateau_patience: int = _PLATEAU_PATIENCE
    lr_factor: float = _LR_FACTOR
    seed: int = 0

    def validate(self) -> None:
        if self.epochs < 0:
            raise ParameterError("epochs must be non-negative, got %s" % self.epochs)
        if self.batch_size <= 0:
            raise ParameterError("batch_size must be positive, got %s" % self.batch_size)
        if self.learning_rate <= 0:
            raise ParameterError("learning_rate must be positive, got %s" % self.learning_rate)
        if self.plateau_patience <= 0:
            raise ParameterError("plateau_patience must be positive, got %s" % self.plateau_patience)
        if not 0.0 < self.lr_factor < 1.0:
            raise ParameterError("lr_factor must lie in (0, 1), got %s" % self.lr_factor)


class FrameDataset:
    """Normalised per-frame feature vectors and their overlap labels (1.0 for overlap)."""

    __slots__ = ('features', 'labels')

    def __init__(self, features: np.ndarray, labels: np.ndarray) -> None:
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.float64)
        if features.ndim != 2 or labels.shape != (features.shape[0],):
            raise ShapeError("%s features do not match %s labels" % (features.shape, labels.shape))
        self.features = features
        self.labels = labels

    def __len__(self) -> int:
        return self.features.shape[0]

    def __repr__(self) -> str:
        return '<FrameDataset:{frames=%d, dim=%d, overlap=%.3f}>' % (
            len(self),
            self.features.shape[1],
            float(self.labels.mean()) if len(self) else 0.0,
        )


class TraceRow(NamedTuple):
    epoch: int
    train_loss: float
    dev_loss: float
    lr: float  # rate used during this epoch
    seconds: float


def write_trace_csv(rows: Sequence[TraceRow], path: PathType, append: bool = False) -> None:
    """``epoch,train_loss,dev_loss,lr,seconds`` with a header line; appending skips the header."""
    with open(path, 'a' if append else 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        if not append:
            writer.writerow(TraceRow._fields)
        writer.writerows([row.epoch] + [repr(float(value)) for value in row[1:]] for row in rows)


def read_trace_csv(path: PathType) -> List[TraceRow]:
    with open(path, encoding='utf-8', newline='') as f:
        rows = list(csv.reader(f))
    return [TraceRow(int(e), float(t), float(d), float(lr), float(s)) for e, t, d, lr, s in rows[1:]]


class TrainingState(NamedTuple):
    """Everything besides the parameters needed to resume training."""

    epoch: int = 0  # completed epochs
    learning_rate: float = _LEARNING_RATE
    best_dev_loss: float = float('inf')
    bad_epochs: int = 0


class PlateauScheduler:

    """Multiply the learning rate by ``factor`` after ``patience`` epochs without improvement.

    An epoch improves when its dev loss is strictly lower than the best seen
    so far. Firing resets the counter but keeps the best loss.
    """

    __slots__ = ('lr', 'patience', 'factor', 'best', 'bad_epochs')

    def __init__(
        self,
        lr: float,
        patience: int = _PLATEAU_PATIENCE,
        factor: float = _LR_FACTOR,
        best: float = float('inf'),
        bad_epochs: int = 0,
    ) -> None:
        self.lr = lr
        self.patience = patience
        self.factor = factor
        self.best = best
        self.bad_epochs = bad_epochs

    def observe(self, dev_loss: float) -> bool:
        """Record one epoch's dev loss; True when the rate was reduced."""
        if dev_loss < self.best:
            self.best = dev_loss
            self.bad_epochs = 0
            return False
        self.bad_epochs += 1
        if self.bad_epochs < self.patience:
            return False
        self.lr *= self.factor
        self.bad_epochs = 0
        log.info(
            'Dev loss has not improved on %.6f for %d epochs, lr -> %g', self.best, self.patience, self.lr
        )
        return True


def lr_schedule_update(
    history: Sequence[float],
    current_lr: float,
    patience: int = _PLATEAU_PATIENCE,
    factor: float = _LR_FACTOR,
) -> float:
    """The rate to use after the last epoch of ``history``, given the rate used during it."""
    if not history:
        raise ParameterError("The dev-loss history is empty")
    scheduler = PlateauScheduler(current_lr, patience, factor)
    fired = False
    for dev_loss in history:
        fired = scheduler.observe(dev_loss)
    return current_lr * factor if fired else current_lr


def predict_proba(model: Model, features: np.ndarray, chunk: int = _PREDICT_CHUNK) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if not len(features):
        return np.zeros(0)
    return np.concatenate([forward(model, features[i : i + chunk]) for i in range(0, len(features), chunk)])


def predict(
    model: Model, features: np.ndarray, threshold: float = _THRESHOLD
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-frame overlap decisions (probability >= threshold) and the raw probabilities."""
    if not 0.0 <= threshold <= 1.0:
        raise ParameterError("Threshold must lie in [0, 1], got %s" % threshold)
    probabilities = predict_proba(model, features)
    return probabilities >= threshold, probabilities


def evaluate_loss(model: Model, dataset: FrameDataset) -> float:
    return bce_loss(predict_proba(model, dataset.features), dataset.labels)


EpochCallback = Callable[[TraceRow, TrainingState, Model, Model], None]


def train(
    model: Model,
    train_set: FrameDataset,
    dev_set: FrameDataset,
    config: TrainConfig,
    state: Optional[TrainingState] = None,
    best_model: Optional[Model] = None,
    on_epoch: Optional[EpochCallback] = None,
) -> Tuple[Model, List[TraceRow]]:
    """Train a copy of ``model`` and return the best-dev-loss parameters with the loss trace.

    Each epoch shuffles the training frames with a generator derived from
    (seed, 'shuffle', epoch), so a run resumed from ``state`` replays the
    same batches. ``on_epoch`` receives each trace row and the state after that
    epoch together with the current and best models, for checkpointing.
    """
    config.validate()
    if not len(train_set) or not len(dev_set):
        raise EmptyDatasetError(
            "Training needs frames in both sets, got %d train / %d dev" % (len(train_set), len(dev_set))
        )
    state = state or TrainingState(learning_rate=config.learning_rate)
    current = model.copy()
    best = (best_model or model).copy()
    scheduler = PlateauScheduler(
        state.learning_rate, config.plateau_patience, config.lr_factor, state.best_dev_loss, state.bad_epochs
    )
    trace: List[TraceRow] = []
    stopwatch = Stopwatch()
    num_frames = len(train_set)

    for epoch in range(state.epoch, config.epochs):
        lr = scheduler.lr
        order = make_rng(config.seed, 'shuffle', epoch).permutation(num_frames)
        loss_sum = 0.0
        for start in range(0, num_frames, config.batch_size):
            index = order[start : start + config.batch_size]
            batch, labels = train_set.features[index], train_set.labels[index]
            cache = forward_cached(current, batch)
            loss_sum += bce_loss(cache.probabilities, labels) * len(index)
            sgd_step(current, backward(current, batch, labels, cache), lr)
            log.debug('epoch %d batch %d: lr=%g', epoch + 1, start // config.batch_size, lr)
        train_loss = loss_sum / num_frames
        dev_loss = evaluate_loss(current, dev_set)
        if dev_loss < scheduler.best:
            best = current.copy()
        scheduler.observe(dev_loss)
        seconds = stopwatch.lap()
        row = TraceRow(epoch + 1, train_loss, dev_loss, lr, seconds)
        trace.append(row)
        log.info(
            'epoch %d/%d: train_loss=%.6f dev_loss=%.6f lr=%g (%.2f s)',
            epoch + 1,
            config.epochs,
            train_loss,
            dev_loss,
            lr,
            seconds,
        )
        if on_epoch is not None:
            state = TrainingState(epoch + 1, scheduler.lr, scheduler.best, scheduler.bad_epochs)
            on_epoch(row, state, current, best)
    return best, trace
