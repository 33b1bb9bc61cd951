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
"""Wall-clock timing of experiment stages."""

import time
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass

from thc_threshold_bandit.observability.logger import LogLevel, logger


@dataclass
class Stopwatch:
    """Elapsed wall time of a timed block, filled in when the block exits.

    Attributes:
        topic (str): Description of the timed block.
        elapsed (float): Seconds spent in the block.
    """

    topic: str
    elapsed: float = 0.0


@contextmanager
def timer(topic: str) -> Iterator[Stopwatch]:
    """Measure a block and log its duration.

    Args:
        topic (str): Description of the block being timed.

    Yields:
        Stopwatch: Holder whose ``elapsed`` is set once the block finishes.
    """
    stopwatch = Stopwatch(topic=topic)
    start_time = time.perf_counter()
    try:
        yield stopwatch
    finally:
        stopwatch.elapsed = time.perf_counter() - start_time
        logger.highlight(level=LogLevel.INFO, message=f"[Timer] {topic} completed in {stopwatch.elapsed:.2f} seconds.")
