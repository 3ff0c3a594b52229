#!/usr/bin/env python


"""Unit tests for cochannel._utils.seeds."""

import numpy as np

from cochannel._utils.seeds import derive_seed, make_rng, seed_sequence


def test_named_streams_are_reproducible():
    a = make_rng(7, 'mixing', 3).random(5)
    b = make_rng(7, 'mixing', 3).random(5)
    np.testing.assert_array_equal(a, b)


def test_names_and_roots_give_independent_streams():
    reference = make_rng(7, 'mixing', 3).random(5)
    for other in (make_rng(7, 'mixing', 4), make_rng(7, 'shuffle', 3), make_rng(8, 'mixing', 3), make_rng(7)):
        assert not np.array_equal(other.random(5), reference)


def test_derived_seeds():
    seeds = {derive_seed(0, 'mixture', index) for index in range(1000)}
    assert len(seeds) == 1000
    assert all(0 <= seed < 2**63 for seed in seeds)
    assert derive_seed(5, 'init') == derive_seed(5, 'init')


def test_seed_sequence_entropy():
    assert seed_sequence(3, 'corpus').entropy == seed_sequence(3, 'corpus').entropy
    assert seed_sequence(3, 1).entropy == [3, 1]
