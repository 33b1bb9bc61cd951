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
"""Per-arm running statistics: observed/pending counts, empirical mean and empirical standard deviation.

The empirical variance divides by the number of observed rewards ``t`` (not ``t - 1``). Means and sums of squared
deviations are maintained with Welford's one-pass recurrence.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from thc_threshold_bandit.errors import DomainError, PreconditionError, ProtocolError
from thc_threshold_bandit.observability import LogLevel, logger


def _check_reward(x: float) -> None:
    if not 0.0 <= x <= 1.0:
        logger.highlight(level=LogLevel.ERROR, message=f"[Stats] Reward {x} outside [0, 1].")
        raise DomainError(f"Reward must lie in [0, 1], got {x}")


def welford_step(count: int, mean: float, m2: float, x: float) -> tuple[float, float]:
    """One Welford update.

    Args:
        count (int): Number of samples including ``x``.
        mean (float): Mean of the previous ``count - 1`` samples.
        m2 (float): Sum of squared deviations of the previous samples.
        x (float): The new sample.

    Returns:
        tuple[float, float]: Updated mean and sum of squared deviations (clamped at 0).
    """
    delta = x - mean
    mean += delta / count
    m2 += delta * (x - mean)
    return mean, max(m2, 0.0)


@dataclass
class ArmStats:
    """Running state of one arm.

    Attributes:
        observed_count (int): T_k, rewards observed so far.
        pending_count (int): tau_k, pulls issued whose reward is not observed yet.
        mean_acc (float): Running empirical mean.
        m2_acc (float): Running sum of squared deviations from the mean.
    """

    observed_count: int = 0
    pending_count: int = 0
    mean_acc: float = 0.0
    m2_acc: float = 0.0

    def record_pull_issued(self) -> "ArmStats":
        """Count a pull whose reward is not observed yet.

        Returns:
            ArmStats: This instance.
        """
        self.pending_count += 1
        return self

    def record_reward(self, x: float) -> "ArmStats":
        """Resolve one pending pull with its reward.

        Args:
            x (float): Reward in [0, 1].

        Returns:
            ArmStats: This instance.

        Raises:
            DomainError: If the reward lies outside [0, 1].
            ProtocolError: If there is no pending pull to resolve.
        """
        _check_reward(x)
        if self.pending_count == 0:
            logger.highlight(level=LogLevel.ERROR, message="[Stats] Reward recorded for an arm without a pending pull.")
            raise ProtocolError("Reward recorded for an arm without a pending pull")
        self.pending_count -= 1
        self.observed_count += 1
        self.mean_acc, self.m2_acc = welford_step(self.observed_count, self.mean_acc, self.m2_acc, x)
        return self

    def _require_observation(self) -> None:
        if self.observed_count < 1:
            logger.highlight(level=LogLevel.ERROR, message="[Stats] Statistics need at least one observed reward.")
            raise PreconditionError("Statistics need at least one observed reward")

    def mean(self) -> float:
        """Empirical mean of the observed rewards."""
        self._require_observation()
        return self.mean_acc

    def variance(self) -> float:
        """Empirical variance of the observed rewards, dividing by their number."""
        self._require_observation()
        return self.m2_acc / self.observed_count

    def sigma_hat(self) -> float:
        """Empirical standard deviation, ``sqrt(m2 / T)``."""
        return math.sqrt(self.variance())


class ArmStatsTable:
    """Array-backed statistics of all arms of one episode.

    Holds the same quantities as a list of :class:`ArmStats` and applies the same updates, so the episode engine can
    evaluate every arm's index with a handful of vectorized operations.

    Attributes:
        observed (npt.NDArray[np.int64]): T_k per arm.
        pending (npt.NDArray[np.int64]): tau_k per arm.
        means (npt.NDArray[np.float64]): Empirical mean per arm.
        m2 (npt.NDArray[np.float64]): Sum of squared deviations per arm.
    """

    def __init__(self, num_arms: int) -> None:
        """Create an empty table.

        Args:
            num_arms (int): Number of arms K.
        """
        self.observed: npt.NDArray[np.int64] = np.zeros(num_arms, dtype=np.int64)
        self.pending: npt.NDArray[np.int64] = np.zeros(num_arms, dtype=np.int64)
        self.means: npt.NDArray[np.float64] = np.zeros(num_arms, dtype=np.float64)
        self.m2: npt.NDArray[np.float64] = np.zeros(num_arms, dtype=np.float64)

    @classmethod
    def from_stats(cls, per_arm_stats: Sequence[ArmStats]) -> "ArmStatsTable":
        """Build a table from per-arm snapshots.

        Args:
            per_arm_stats (Sequence[ArmStats]): One entry per arm.

        Returns:
            ArmStatsTable: A table holding the same values.
        """
        table = cls(len(per_arm_stats))
        for arm, stats in enumerate(per_arm_stats):
            table.observed[arm] = stats.observed_count
            table.pending[arm] = stats.pending_count
            table.means[arm] = stats.mean_acc
            table.m2[arm] = stats.m2_acc
        return table

    @property
    def num_arms(self) -> int:
        """Number of arms."""
        return int(self.observed.shape[0])

    def issue(self, arm: int) -> None:
        """Count a pull of ``arm`` whose reward is not observed yet."""
        self.pending[arm] += 1

    def observe(self, arm: int, x: float) -> None:
        """Resolve one pending pull of ``arm`` with reward ``x``.

        Raises:
            DomainError: If the reward lies outside [0, 1].
            ProtocolError: If the arm has no pending pull.
        """
        _check_reward(x)
        if self.pending[arm] == 0:
            logger.highlight(level=LogLevel.ERROR, message=f"[Stats] Reward recorded for arm {arm} without a pending pull.")
            raise ProtocolError(f"Reward recorded for arm {arm} without a pending pull")
        self.pending[arm] -= 1
        self.observed[arm] += 1
        self.means[arm], self.m2[arm] = welford_step(int(self.observed[arm]), float(self.means[arm]), float(self.m2[arm]), x)

    def sigma_hats(self) -> npt.NDArray[np.float64]:
        """Empirical standard deviations of all arms (0 for arms without observations)."""
        return np.sqrt(self.m2 / np.maximum(self.observed, 1))

    def snapshot(self, arm: int) -> ArmStats:
        """Copy the state of one arm into an :class:`ArmStats`."""
        return ArmStats(
            observed_count=int(self.observed[arm]),
            pending_count=int(self.pending[arm]),
            mean_acc=float(self.means[arm]),
            m2_acc=float(self.m2[arm]),
        )

    def snapshots(self) -> tuple[ArmStats, ...]:
        """Copy the state of every arm."""
        return tuple(self.snapshot(arm) for arm in range(self.num_arms))


def batch_mean_sigma(rewards: Sequence[float] | npt.NDArray[np.float64]) -> tuple[float, float]:
    """Two-pass empirical mean and standard deviation (dividing by ``t``).

    Args:
        rewards (Sequence[float] | npt.NDArray[np.float64]): At least one reward.

    Returns:
        tuple[float, float]: Mean and standard deviation.
    """
    values = np.asarray(rewards, dtype=np.float64)
    if values.size == 0:
        logger.highlight(level=LogLevel.ERROR, message="[Stats] Statistics need at least one observed reward.")
        raise PreconditionError("Statistics need at least one observed reward")
    mean = float(values.mean())
    return mean, math.sqrt(float(np.mean((values - mean) ** 2)))
