""" cochannel: co-channel speech detection toolkit

    Exception hierarchy.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""


class Error(Exception):
    pass


class ConfigError(Error):
    pass


class ParameterError(ConfigError):
    pass


class EmptyDatasetError(ConfigError):
    pass


class DataError(Error):
    pass


class AudioFormatError(DataError):
    pass


class UnsupportedEncodingError(AudioFormatError):
    pass


class SampleRateMismatchError(AudioFormatError):
    pass


class DegenerateSourceError(DataError):
    pass


class CapacityError(DataError):
    pass


class ChecksumError(DataError):
    pass


class FeatureFileError(DataError):
    pass


class EmptyStreamError(DataError):
    pass


class CompatibilityError(Error):
    pass


class PreconditionError(Error):
    pass


class ShapeError(PreconditionError):
    pass


class UndefinedMetricError(Error):
    pass
