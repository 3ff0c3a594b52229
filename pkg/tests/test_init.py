#!/usr/bin/env python


""" Unit tests for the cochannel package surface. """

import re

import cochannel as r


def test_version():
    assert re.fullmatch(r'\d+\.\d+\.\d+', r.__version__)


def test_all_names_resolve():
    for name in r.__all__:
        assert hasattr(r, name), name


def test_feature_kinds_are_exported_with_their_dimensions():
    assert [(kind.value, kind.dim) for kind in r.FeatureKind] == [
        ('magspec', 257),
        ('mfb', 40),
        ('mfcc', 39),
        ('pykno', 120),
    ]


def test_package_logger():
    assert r.log.name == 'cochannel'
