""" cochannel: co-channel speech detection toolkit

    Named sub-seeds derived from one root seed.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import zlib
from typing import Union

import numpy as np


def seed_sequence(root: int, *names: Union[str, int]) -> np.random.SeedSequence:
    """Derive an independent SeedSequence for the component path ``names``.

    Each name is folded into the entropy as a crc32 (strings) or the integer
    itself, so ``seed_sequence(7, 'mixing', 12)`` never depends on what other
    components drew from the root.
    """
    entropy = [int(root) & 0xFFFFFFFFFFFFFFFF]
    for name in names:
        entropy.append(zlib.crc32(name.encode('utf-8')) if isinstance(name, str) else int(name))
    return np.random.SeedSequence(entropy)


def make_rng(root: int, *names: Union[str, int]) -> np.random.Generator:
    """A PCG64 generator for the named component."""
    return np.random.default_rng(seed_sequence(root, *names))


def derive_seed(root: int, *names: Union[str, int]) -> int:
    """A 63-bit integer seed for the named component, suitable for manifests."""
    return int(seed_sequence(root, *names).generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
