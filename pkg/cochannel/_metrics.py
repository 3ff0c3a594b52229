""" cochannel: co-channel speech detection toolkit

    Frame-level confusion counts, scalar metrics and threshold sweeps.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import csv
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from sklearn import metrics as sk_metrics

from ._audio import PathType
from ._exceptions import ShapeError, UndefinedMetricError

ReportValue = Union[int, float, str]

_UNDEFINED = 'undefined'


class ConfusionMatrix(NamedTuple):
    """Counts with overlap as the positive class."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def merged(self, other: 'ConfusionMatrix') -> 'ConfusionMatrix':
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)


class CurvePoint(NamedTuple):
    threshold: float
    x: float
    y: float


def _binary(labels: Sequence) -> np.ndarray:
    return np.asarray(labels).astype(bool)


def _check_lengths(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape or a.ndim != 1:
        raise ShapeError("Predictions %s and truth %s must be equal-length sequences" % (a.shape, b.shape))


def confusion(pred: Sequence, truth: Sequence) -> ConfusionMatrix:
    pred_arr, truth_arr = _binary(pred), _binary(truth)
    _check_lengths(pred_arr, truth_arr)
    if not len(pred_arr):
        return ConfusionMatrix(0, 0, 0, 0)
    tn, fp, fn, tp = sk_metrics.confusion_matrix(truth_arr, pred_arr, labels=[False, True]).ravel()
    return ConfusionMatrix(int(tp), int(fp), int(fn), int(tn))


def _ratio(numerator: int, denominator: int, name: str) -> float:
    if not denominator:
        raise UndefinedMetricError("%s is undefined: zero denominator" % name)
    return numerator / denominator


def accuracy(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tp + cm.tn, cm.total, 'accuracy')


def precision(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tp, cm.tp + cm.fp, 'precision')


def recall(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tp, cm.tp + cm.fn, 'recall')


def fscore(cm: ConfusionMatrix) -> float:
    """Harmonic mean of precision and recall."""
    p, r = precision(cm), recall(cm)
    if p + r == 0.0:
        raise UndefinedMetricError("fscore is undefined: precision and recall are both zero")
    return 2.0 * p * r / (p + r)


def _scored(scores: Sequence[float], truth: Sequence) -> Tuple[np.ndarray, np.ndarray]:
    score_arr = np.asarray(scores, dtype=np.float64)
    truth_arr = _binary(truth)
    _check_lengths(score_arr, truth_arr)
    return score_arr, truth_arr


def roc_curve(scores: Sequence[float], truth: Sequence) -> List[CurvePoint]:
    """(false-positive rate, true-positive rate) at every distinct score, from (0, 0) to (1, 1).

    The first point carries an infinite threshold: nothing is called overlap.
    """
    score_arr, truth_arr = _scored(scores, truth)
    if truth_arr.all() or not truth_arr.any():
        raise UndefinedMetricError("ROC needs both overlap and single frames in the truth labels")
    fpr, tpr, thresholds = sk_metrics.roc_curve(truth_arr, score_arr, drop_intermediate=False)
    return [CurvePoint(float(t), float(x), float(y)) for t, x, y in zip(thresholds, fpr, tpr)]


def auc(curve: Sequence[CurvePoint]) -> float:
    """Trapezoidal area under a curve given in x order."""
    if len(curve) < 2:
        raise UndefinedMetricError("AUC needs at least two curve points")
    return float(sk_metrics.auc([p.x for p in curve], [p.y for p in curve]))


def pr_curve(scores: Sequence[float], truth: Sequence) -> List[CurvePoint]:
    """(recall, precision) at every distinct score, in increasing threshold order."""
    score_arr, truth_arr = _scored(scores, truth)
    if not truth_arr.any():
        raise UndefinedMetricError("A precision-recall curve needs at least one overlap frame")
    precisions, recalls, thresholds = sk_metrics.precision_recall_curve(truth_arr, score_arr)
    # the trailing (recall 0, precision 1) point has no threshold
    return [CurvePoint(float(t), float(r), float(p)) for t, r, p in zip(thresholds, recalls, precisions)]


def average_precision(scores: Sequence[float], truth: Sequence) -> float:
    score_arr, truth_arr = _scored(scores, truth)
    if not truth_arr.any():
        raise UndefinedMetricError("Average precision needs at least one overlap frame")
    return float(sk_metrics.average_precision_score(truth_arr, score_arr))


def write_curve_csv(curve: Sequence[CurvePoint], path: PathType, curve_type: str) -> None:
    """``# <curve_type>`` on the first line, then ``threshold,x,y`` rows."""
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write('# %s\n' % curve_type)
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(CurvePoint._fields)
        writer.writerows((repr(p.threshold), repr(p.x), repr(p.y)) for p in curve)


def read_curve_csv(path: PathType) -> List[CurvePoint]:
    with open(path, encoding='utf-8', newline='') as f:
        rows = list(csv.reader(line for line in f if not line.startswith('#')))
    return [CurvePoint(float(t), float(x), float(y)) for t, x, y in rows[1:]]


def _defined(metric: Callable[[ConfusionMatrix], float], cm: ConfusionMatrix) -> ReportValue:
    try:
        return float(metric(cm))
    except UndefinedMetricError:
        return _UNDEFINED


def summary(
    cm: ConfusionMatrix,
    roc: Optional[Sequence[CurvePoint]] = None,
    mean_epoch_seconds: Optional[float] = None,
) -> Dict[str, ReportValue]:
    """Flat report of the scalar metrics; undefined ones are reported as ``undefined``."""
    report: Dict[str, ReportValue] = {
        'frames': cm.total,
        'tp': cm.tp,
        'fp': cm.fp,
        'fn': cm.fn,
        'tn': cm.tn,
        'accuracy': _defined(accuracy, cm),
        'precision': _defined(precision, cm),
        'recall': _defined(recall, cm),
        'fscore': _defined(fscore, cm),
        'auc': auc(roc) if roc else _UNDEFINED,
    }
    if mean_epoch_seconds is not None:
        report['seconds_per_epoch'] = mean_epoch_seconds
    return report


def write_report(report: Dict[str, ReportValue], path: PathType) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        for key, value in report.items():
            f.write('%s=%s\n' % (key, '%.6f' % value if isinstance(value, float) else value))


def read_report(path: PathType) -> Dict[str, str]:
    with open(path, encoding='utf-8') as f:
        return dict(line.rstrip('\n').split('=', 1) for line in f if '=' in line)
