#!/usr/bin/env python


""" Unit tests for cochannel._exceptions """

import numpy as np
import pytest

import cochannel as r


@pytest.mark.parametrize(
    'exc, parents',
    [
        (r.ParameterError, (r.ConfigError,)),
        (r.EmptyDatasetError, (r.ConfigError,)),
        (r.UnsupportedEncodingError, (r.AudioFormatError, r.DataError)),
        (r.SampleRateMismatchError, (r.AudioFormatError, r.DataError)),
        (r.DegenerateSourceError, (r.DataError,)),
        (r.CapacityError, (r.DataError,)),
        (r.ChecksumError, (r.DataError,)),
        (r.FeatureFileError, (r.DataError,)),
        (r.EmptyStreamError, (r.DataError,)),
        (r.ShapeError, (r.PreconditionError,)),
        (r.CompatibilityError, ()),
        (r.UndefinedMetricError, ()),
    ],
)
def test_hierarchy(exc, parents):
    for parent in parents + (r.Error, Exception):
        assert issubclass(exc, parent)


def test_families_are_disjoint():
    families = (r.ConfigError, r.DataError, r.CompatibilityError, r.PreconditionError, r.UndefinedMetricError)
    for family in families:
        for other in families:
            assert issubclass(family, other) == (family is other)


def test_empty_training_set_is_a_config_error():
    empty = r.FrameDataset(np.zeros((0, 40)), np.zeros(0))
    with pytest.raises(r.ConfigError):
        r.train(r.Model.initialize((1, 2, 2, 2, 2, 2, 2), 0), empty, empty, r.TrainConfig(epochs=1))
