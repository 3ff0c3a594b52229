""" cochannel: co-channel speech detection toolkit

    Pipeline constants.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

# Audio

_SAMPLE_RATE = 8000  # Hz
_PCM_SCALE = 32768  # 16-bit full scale
_FRAME_LEN = 200  # samples, 25 ms
_HOP = 80  # samples, 10 ms
_PREEMPHASIS = 0.97

# Mixing

_SIR_RANGE_DB = (0.0, 5.0)
_VAD_THRESHOLD_DB = -40.0
_SYNTH_PEAK = 0.9
_SYNTH_F0_RANGE = (50.0, 400.0)
_MALE_F0_RANGE = (90.0, 150.0)
_FEMALE_F0_RANGE = (170.0, 260.0)
_SYNTH_UTTERANCE_SECONDS = (2.0, 3.0)
_MIN_SPEAKERS = 4
_TEST_SPEAKER_FRACTION = 0.2

_SPLIT_TRAIN = 'train'
_SPLIT_DEV = 'dev'
_SPLIT_TEST = 'test'
_SPLITS = (_SPLIT_TRAIN, _SPLIT_DEV, _SPLIT_TEST)

_LABEL_OVERLAP = 'O'
_LABEL_SINGLE = 'S'

# Features

_FFT_SIZE = 512
_N_MEL = 40
_MEL_RANGE = (0.0, 4000.0)
_N_CEPS = 12
_LIFTER = 22
_DELTA_WINDOW = 2
_N_GAMMATONE = 120
_GAMMATONE_RANGE = (50.0, 3800.0)
_GAMMATONE_ORDER = 4
_ERB_FACTOR = 1.019
_PYKNO_ACCEPTANCE_RATIO = 0.5
_LOG_FLOOR = 1e-10
_STD_FLOOR = 1e-8
# gammatone impulse responses decay below 1e-6 of their peak within this many samples
_GAMMATONE_TAIL = 1024

# CNN recipe

_CHANNEL_PLAN = (1, 128, 128, 128, 128, 128, 32)
_KERNEL_SIZE = 2
_EPOCHS = 200
_BATCH_SIZE = 32
_LEARNING_RATE = 0.001
_PLATEAU_PATIENCE = 3
_LR_FACTOR = 0.5
_PROB_CLAMP = 1e-7
_THRESHOLD = 0.5
_PREDICT_CHUNK = 4096  # frames per forward pass when predicting

# File formats

_FEATURE_MAGIC = b'FTR1'
_CHECKPOINT_MAGIC = b'OVL1'
_CHECKPOINT_VERSION = 1

# Process exit codes

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_DATA = 3
_EXIT_COMPATIBILITY = 4
