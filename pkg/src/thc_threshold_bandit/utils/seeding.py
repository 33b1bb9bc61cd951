# Copyright 2025 Tsung-Han Chang. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Deterministic derivation of random streams from a single root seed.

A stream is identified by ``(root_seed, purpose, *key)`` and built with :class:`numpy.random.SeedSequence` using the
purpose and key as ``spawn_key``. Streams therefore depend only on their identity, never on how many other streams
were created before them: adding an arm or a policy to an experiment leaves every other stream untouched.
"""

from enum import IntEnum

import numpy as np


class SeedPurpose(IntEnum):
    """What a derived stream is used for."""

    INSTANCE = 1
    EPISODE = 2
    REWARDS = 3
    LOWER_BOUND = 4
    CONCENTRATION = 5
    SUMMARY = 6


def seed_sequence(root_seed: int, purpose: SeedPurpose, *key: int) -> np.random.SeedSequence:
    """Build the seed sequence of one stream.

    Args:
        root_seed (int): Non-negative root seed.
        purpose (SeedPurpose): Purpose of the stream.
        *key (int): Further identity, e.g. replication or arm index.

    Returns:
        np.random.SeedSequence: The stream's seed sequence.
    """
    if root_seed < 0:
        raise ValueError(f"Seeds must be non-negative, got {root_seed}")
    return np.random.SeedSequence(root_seed, spawn_key=(int(purpose), *key))


def derive_seed(root_seed: int, purpose: SeedPurpose, *key: int) -> int:
    """Derive a child integer seed, e.g. the seed of one episode.

    Args:
        root_seed (int): Non-negative root seed.
        purpose (SeedPurpose): Purpose of the stream.
        *key (int): Further identity.

    Returns:
        int: A 63-bit non-negative seed.
    """
    state = seed_sequence(root_seed, purpose, *key).generate_state(1, dtype=np.uint64)
    return int(state[0]) >> 1


def make_rng(root_seed: int, purpose: SeedPurpose, *key: int) -> np.random.Generator:
    """Create the generator of one stream.

    Args:
        root_seed (int): Non-negative root seed.
        purpose (SeedPurpose): Purpose of the stream.
        *key (int): Further identity.

    Returns:
        np.random.Generator: A PCG64 generator.
    """
    return np.random.default_rng(seed_sequence(root_seed, purpose, *key))
