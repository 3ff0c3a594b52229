""" cochannel: co-channel speech detection toolkit

    Label files: one ``O`` (overlap) or ``S`` (single) character per frame, one frame per line.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import numpy as np

from .._audio import PathType
from .._exceptions import DataError, ShapeError
from .._mixer.mixing import labels_from_text, labels_to_text


def write_labels(labels: np.ndarray, path: PathType) -> None:
    with open(path, 'w', encoding='ascii', newline='\n') as f:
        f.writelines(char + '\n' for char in labels_to_text(labels))


def read_labels(path: PathType) -> np.ndarray:
    with open(path, encoding='ascii') as f:
        text = ''.join(line.rstrip('\n') for line in f)
    try:
        return labels_from_text(text)
    except ShapeError as exc:
        raise DataError("Malformed label file %s: %s" % (path, exc)) from exc
