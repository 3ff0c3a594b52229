#!/usr/bin/env python


""" conftest for cochannel tests. """

import threading

import pytest

from cochannel import SyntheticCorpus


@pytest.fixture(autouse=True)
def verify_threads_ended():
    """Verify that worker pools are shut down after the test."""
    threads_before = frozenset(threading.enumerate())
    yield
    threads = frozenset(threading.enumerate()) - threads_before
    assert not threads


@pytest.fixture
def small_corpus():
    """Four synthetic speakers (two male, two female) with three utterances each."""
    return SyntheticCorpus(n_speakers=4, utterances_per_speaker=3, seed=5)
