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
"""Arm-selection indices of the thresholding policies and the final classification.

Every policy pulls the arm with the smallest index; a smaller index means the arm is harder to classify with the data
seen so far. With ``d = |mean - b|``, ``s`` the empirical standard deviation, ``T`` observed and ``tau`` pending pulls,
and ``m = T + delta * tau``:

    ATP           d * sqrt(T)
    EVT/AP_EVT    d / (a/m + sqrt(a/m) * s)                   (EVT: m = T)
    EVT_PF/AP_EVT_PF  sqrt(m) * (sqrt(s^2 + d) - s)           (EVT_PF: m = T)
    EVT_BERNSTEIN     d / (sqrt(2 s^2 a/m) + 3 a/m)

Ties go to the lowest arm index.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
import numpy.typing as npt

from thc_threshold_bandit.bandit.stats import ArmStats, ArmStatsTable
from thc_threshold_bandit.errors import ConfigurationError, PreconditionError
from thc_threshold_bandit.observability import LogLevel, logger


class PolicyKind(str, Enum):
    """Index rule used to pick the next arm."""

    ATP = "ATP"
    EVT = "EVT"
    AP_EVT = "AP_EVT"
    EVT_PF = "EVT_PF"
    AP_EVT_PF = "AP_EVT_PF"
    EVT_BERNSTEIN = "EVT_BERNSTEIN"

    @property
    def is_parameter_dependent(self) -> bool:
        """Whether the index needs the exploration parameter ``a``."""
        return self in {PolicyKind.EVT, PolicyKind.AP_EVT, PolicyKind.EVT_BERNSTEIN}

    @property
    def uses_pending(self) -> bool:
        """Whether pending pulls enter the index through ``delta``."""
        return self in {PolicyKind.AP_EVT, PolicyKind.AP_EVT_PF, PolicyKind.EVT_BERNSTEIN}


@dataclass(frozen=True)
class PolicyConfig:
    """Which index to use and its parameters.

    Attributes:
        kind (PolicyKind): The index rule.
        b (float): The threshold.
        a (float | None): Exploration parameter of the parameter-dependent kinds; None until resolved.
        delta (float): Weight in [0, 1] of pending pulls; ignored by ATP, EVT and EVT_PF.
    """

    kind: PolicyKind
    b: float
    a: float | None = None
    delta: float = 0.0

    def __post_init__(self) -> None:
        """Validate the parameter ranges."""
        if not 0.0 <= self.delta <= 1.0:
            raise ConfigurationError(f"delta must lie in [0, 1], got {self.delta}")
        if self.a is not None and not self.a >= 0.0:
            raise ConfigurationError(f"a must be non-negative, got {self.a}")
        if not math.isfinite(self.b):
            raise ConfigurationError(f"Threshold must be finite, got {self.b}")

    @property
    def effective_delta(self) -> float:
        """``delta`` for kinds that weigh pending pulls, 0 otherwise."""
        return self.delta if self.kind.uses_pending else 0.0

    def with_a(self, a: float) -> "PolicyConfig":
        """Return a copy with the exploration parameter set."""
        return replace(self, a=a)


@dataclass(frozen=True)
class Classification:
    """Partition of the arms into estimated-above and estimated-below the threshold.

    Attributes:
        above (frozenset[int]): Arms whose empirical mean is at least the threshold.
        below (frozenset[int]): The remaining arms.
    """

    above: frozenset[int]
    below: frozenset[int]


def _require_observed(observed_count: int) -> None:
    if observed_count < 1:
        logger.highlight(level=LogLevel.ERROR, message=f"[Policy] Index needs an observed reward, got observed_count={observed_count}.")
        raise PreconditionError(f"Index needs at least one observed reward, got observed_count={observed_count}")


def _require_positive_a(a: float | None) -> float:
    if a is None or not a > 0.0:
        logger.highlight(level=LogLevel.ERROR, message=f"[Policy] Exploration parameter a must be positive, got {a}.")
        raise ConfigurationError(f"Exploration parameter a must be positive, got {a}")
    return a


def index_atp(delta_hat: float, observed_count: int) -> float:
    """ATP index ``d * sqrt(T)``.

    Args:
        delta_hat (float): ``|mean - b|``.
        observed_count (int): Observed rewards, at least 1.

    Returns:
        float: The index.
    """
    _require_observed(observed_count)
    return delta_hat * math.sqrt(observed_count)


def index_ap_evt(  # pylint: disable=too-many-arguments
    delta_hat: float,
    sigma_hat: float,
    observed_count: int,
    pending_count: int,
    a: float,
    delta: float,
) -> float:
    """AP-EVT index ``d / (a/m + sqrt(a/m) * s)`` with ``m = T + delta * tau``.

    Args:
        delta_hat (float): ``|mean - b|``.
        sigma_hat (float): Empirical standard deviation.
        observed_count (int): Observed rewards, at least 1.
        pending_count (int): Pending pulls.
        a (float): Exploration parameter, positive.
        delta (float): Weight of pending pulls.

    Returns:
        float: The index.

    Raises:
        ConfigurationError: If ``a`` is not positive.
        PreconditionError: If no reward was observed.
    """
    _require_positive_a(a)
    _require_observed(observed_count)
    ratio = a / (observed_count + delta * pending_count)
    return delta_hat / (ratio + math.sqrt(ratio) * sigma_hat)


def index_evt(delta_hat: float, sigma_hat: float, observed_count: int, a: float) -> float:
    """EVT index, the AP-EVT index without pending pulls."""
    return index_ap_evt(delta_hat, sigma_hat, observed_count, 0, a, 0.0)


def index_ap_evt_pf(delta_hat: float, sigma_hat: float, observed_count: int, pending_count: int, delta: float) -> float:
    """Parameter-free AP-EVT index ``sqrt(m) * (sqrt(s^2 + d) - s)``.

    Args:
        delta_hat (float): ``|mean - b|``.
        sigma_hat (float): Empirical standard deviation.
        observed_count (int): Observed rewards, at least 1.
        pending_count (int): Pending pulls.
        delta (float): Weight of pending pulls.

    Returns:
        float: The index.
    """
    _require_observed(observed_count)
    return math.sqrt(observed_count + delta * pending_count) * (math.sqrt(sigma_hat * sigma_hat + delta_hat) - sigma_hat)


def index_evt_pf(delta_hat: float, sigma_hat: float, observed_count: int) -> float:
    """Parameter-free EVT index, the AP-EVT_pf index with ``delta = 0``."""
    return index_ap_evt_pf(delta_hat, sigma_hat, observed_count, 0, 0.0)


def index_evt_bernstein(  # pylint: disable=too-many-arguments
    delta_hat: float,
    sigma_hat: float,
    observed_count: int,
    pending_count: int,
    a: float,
    delta: float,
) -> float:
    """Index with the concentration constants ``d / (sqrt(2 s^2 a/m) + 3 a/m)``.

    Args:
        delta_hat (float): ``|mean - b|``.
        sigma_hat (float): Empirical standard deviation.
        observed_count (int): Observed rewards, at least 1.
        pending_count (int): Pending pulls.
        a (float): Exploration parameter, positive.
        delta (float): Weight of pending pulls.

    Returns:
        float: The index.
    """
    _require_positive_a(a)
    _require_observed(observed_count)
    ratio = a / (observed_count + delta * pending_count)
    return delta_hat / (math.sqrt(2.0 * sigma_hat * sigma_hat * ratio) + 3.0 * ratio)


def compute_indices(table: ArmStatsTable, config: PolicyConfig) -> npt.NDArray[np.float64]:
    """Evaluate the configured index for every arm at once.

    Uses the same operation order as the scalar ``index_*`` functions, so both give identical values.

    Args:
        table (ArmStatsTable): Current per-arm statistics; every arm needs an observed reward.
        config (PolicyConfig): The policy.

    Returns:
        npt.NDArray[np.float64]: One index per arm.

    Raises:
        PreconditionError: If some arm has no observed reward.
        ConfigurationError: If a parameter-dependent policy has no positive ``a``.
    """
    if table.observed.min() < 1:
        logger.highlight(level=LogLevel.ERROR, message="[Policy] Every arm needs an observed reward before indices can be computed.")
        raise PreconditionError("Every arm needs an observed reward before indices can be computed")
    delta_hat = np.abs(table.means - config.b)
    if config.kind is PolicyKind.ATP:
        return delta_hat * np.sqrt(table.observed)

    sigma = table.sigma_hats()
    effective = table.observed + config.effective_delta * table.pending
    if config.kind in (PolicyKind.EVT_PF, PolicyKind.AP_EVT_PF):
        return np.sqrt(effective) * (np.sqrt(sigma * sigma + delta_hat) - sigma)

    ratio = _require_positive_a(config.a) / effective
    if config.kind is PolicyKind.EVT_BERNSTEIN:
        return delta_hat / (np.sqrt(2.0 * sigma * sigma * ratio) + 3.0 * ratio)
    return delta_hat / (ratio + np.sqrt(ratio) * sigma)


def select_from_table(table: ArmStatsTable, config: PolicyConfig) -> int:
    """Arm with the smallest index; ties go to the lowest arm index."""
    return int(np.argmin(compute_indices(table, config)))


def select_arm(per_arm_stats: Sequence[ArmStats], config: PolicyConfig) -> int:
    """Pick the next arm to pull.

    Args:
        per_arm_stats (Sequence[ArmStats]): Statistics of every arm; each needs an observed reward.
        config (PolicyConfig): The policy.

    Returns:
        int: Index of the arm with the smallest policy index, lowest index on ties.

    Raises:
        PreconditionError: If the list is empty or some arm has no observed reward.
    """
    if not per_arm_stats:
        logger.highlight(level=LogLevel.ERROR, message="[Policy] Cannot select among zero arms.")
        raise PreconditionError("Cannot select among zero arms")
    for arm, stats in enumerate(per_arm_stats):
        if stats.observed_count < 1:
            logger.highlight(level=LogLevel.ERROR, message=f"[Policy] Arm {arm} has no observed reward.")
            raise PreconditionError(f"Arm {arm} has no observed reward")
    return select_from_table(ArmStatsTable.from_stats(per_arm_stats), config)


def classify_means(means: Sequence[float] | npt.NDArray[np.float64], b: float) -> Classification:
    """Split arms by whether their mean is at least ``b``.

    Args:
        means (Sequence[float] | npt.NDArray[np.float64]): One mean per arm.
        b (float): The threshold; equality counts as above.

    Returns:
        Classification: The partition.
    """
    above = frozenset(arm for arm, mean in enumerate(means) if mean >= b)
    return Classification(above=above, below=frozenset(range(len(means))) - above)


def classify(per_arm_stats: Sequence[ArmStats], b: float) -> Classification:
    """Final classification from the observed rewards.

    Args:
        per_arm_stats (Sequence[ArmStats]): Statistics of every arm; each needs an observed reward.
        b (float): The threshold.

    Returns:
        Classification: Arms with empirical mean at least ``b`` versus the rest.
    """
    return classify_means([stats.mean() for stats in per_arm_stats], b)
