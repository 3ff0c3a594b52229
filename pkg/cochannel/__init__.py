""" cochannel: co-channel speech detection toolkit

    Detect frames where two talkers overlap in a single-channel recording:
    labelled mixture synthesis, four per-frame feature families (magnitude
    spectrum, log mel filterbank, MFCC, pyknogram), a small 1-D convolutional
    classifier trained with plain SGD, and frame-level evaluation.

    This library is free software; you can redistribute it and/or
    modify it under the terms of the GNU Lesser General Public
    License as published by the Free Software Foundation; either
    version 2.1 of the License, or (at your option) any later version.

    This library is distributed in the hope that it will be useful,
    but WITHOUT ANY WARRANTY; without even the implied warranty of
    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU
    Lesser General Public License for more details.
"""

from ._audio import AudioClip, FrameGrid, frame_signal, preemphasize, read_wav, write_wav  # noqa
from ._cnn.model import (  # noqa
    ConvLayer,
    Model,
    backward,
    bce_loss,
    forward,
    sgd_step,
)
from ._cnn.training import (  # noqa
    FrameDataset,
    PlateauScheduler,
    TraceRow,
    TrainConfig,
    TrainingState,
    lr_schedule_update,
    predict,
    predict_proba,
    train,
)
from ._exceptions import (  # noqa
    AudioFormatError,
    CapacityError,
    ChecksumError,
    CompatibilityError,
    ConfigError,
    DataError,
    DegenerateSourceError,
    EmptyDatasetError,
    EmptyStreamError,
    Error,
    FeatureFileError,
    ParameterError,
    PreconditionError,
    SampleRateMismatchError,
    ShapeError,
    UndefinedMetricError,
    UnsupportedEncodingError,
)
from ._features import FeatureKind, FeatureMatrix  # noqa
from ._features.extractor import FeatureExtractor, extract  # noqa
from ._features.normalizer import Normalizer, apply_normalizer, fit_normalizer, unnormalize  # noqa
from ._features.pyknogram import (  # noqa
    GammatoneBank,
    design_gammatone_bank,
    desa1,
    pyknogram,
    pyknogram_energy,
    teo,
)
from ._features.spectral import (  # noqa
    MelBank,
    dct_ii,
    deltas,
    idct_ii,
    lifter,
    log_mel,
    magnitude_spectrum,
    mel_filterbank,
    mfcc,
    stft_magnitude,
)
from ._logger import QuietLogger, log  # noqa
from ._metrics import (  # noqa
    ConfusionMatrix,
    CurvePoint,
    accuracy,
    auc,
    average_precision,
    confusion,
    fscore,
    pr_curve,
    precision,
    recall,
    roc_curve,
    summary,
)
from ._mixer.corpus import Corpus, Gender, SyntheticCorpus, Utterance, WavCorpus, synth_speechlike  # noqa
from ._mixer.dataset import (  # noqa
    DatasetManifest,
    ManifestEntry,
    Pairing,
    generate_dataset,
    partition_speakers,
    render_dataset,
)
from ._mixer.mixing import (  # noqa
    FrameLabel,
    LabeledMixture,
    MixtureSpec,
    label_frames,
    mix_at_offset,
    scale_to_sir,
)
from ._protocol.checkpoint import Checkpoint, load_checkpoint, read_checkpoint, save_checkpoint  # noqa
from ._protocol.features import read_features, write_features  # noqa
from ._protocol.labels import read_labels, write_labels  # noqa
from ._protocol.manifest import read_manifest, write_manifest  # noqa
from .config import RunConfig, build_config, load_config  # noqa

__version__ = '0.1.0'
__license__ = 'LGPL'


__all__ = [
    "__version__",
    "AudioClip",
    "FrameGrid",
    "MixtureSpec",
    "DatasetManifest",
    "FeatureKind",
    "FeatureMatrix",
    "Normalizer",
    "Model",
    "TrainConfig",
    "ConfusionMatrix",
    "RunConfig",
    "Error",
    "mix_at_offset",
    "generate_dataset",
    "synth_speechlike",
    "extract",
    "train",
    "predict",
]
