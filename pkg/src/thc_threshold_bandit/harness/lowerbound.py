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
"""Stress run on the Bernoulli hard instances against the minimax lower bound.

At desk-scale budgets the bound is astronomically small, so the comparison is a smoke test of the plumbing, not a
measure of tightness.
"""

from dataclasses import dataclass

from thc_threshold_bandit.bandit.complexity import (
    TBP_THRESHOLD,
    lower_bound_exponent,
    lower_bound_mistake_probability,
    make_tbp_instance,
    summarize,
)
from thc_threshold_bandit.bandit.env import DelayModel, run_episode
from thc_threshold_bandit.bandit.policies import PolicyKind
from thc_threshold_bandit.errors import ConfigurationError
from thc_threshold_bandit.harness.config import PolicySpec
from thc_threshold_bandit.observability import LogLevel, logger
from thc_threshold_bandit.utils.seeding import SeedPurpose, derive_seed
from thc_threshold_bandit.utils.timer import timer


@dataclass(frozen=True)
class InstanceMistakeRate:
    """Empirical mistake rate on one hard instance."""

    instance: int
    mistake_rate: float


@dataclass(frozen=True)
class LowerBoundReport:  # pylint: disable=too-many-instance-attributes
    """Empirical worst-case mistake rate next to the lower bound.

    Attributes:
        policy (str): Policy name.
        num_arms (int): Number of arms K.
        gap (float): Common gap of every arm.
        n (int): Budget.
        replications (int): Episodes per instance.
        per_instance (tuple[InstanceMistakeRate, ...]): Mistake rate of instances ``0..K``.
        h_evt (float): Complexity shared by all the instances.
        exponent (float): Logarithm of the lower bound.
        theoretical (float): The lower bound, usually 0 after underflow.
    """

    policy: str
    num_arms: int
    gap: float
    n: int
    replications: int
    per_instance: tuple[InstanceMistakeRate, ...]
    h_evt: float
    exponent: float
    theoretical: float

    @property
    def empirical_max(self) -> float:
        """Largest mistake rate over the instances."""
        return max(rate.mistake_rate for rate in self.per_instance)

    @property
    def holds(self) -> bool:
        """Whether the empirical worst case is at least the lower bound."""
        return self.empirical_max >= self.theoretical


def run_lowerbound(  # pylint: disable=too-many-arguments
    num_arms: int,
    gap: float,
    n: int,
    replications: int,
    policy: PolicySpec | None = None,
    root_seed: int = 0,
) -> LowerBoundReport:
    """Run a policy on every hard instance ``0..K`` and compare its worst mistake rate with the lower bound.

    Args:
        num_arms (int): Number of arms K.
        gap (float): Gap of every arm, in (0, 1/4].
        n (int): Budget, greater than ``2K``.
        replications (int): Episodes per instance.
        policy (PolicySpec | None): Policy to stress; EVT with ``a = n / K`` by default.
        root_seed (int): Root seed.

    Returns:
        LowerBoundReport: Per-instance rates and the bound.
    """
    if replications < 1:
        raise ConfigurationError(f"replications must be at least 1, got {replications}")
    policy = policy or PolicySpec(kind=PolicyKind.EVT)
    gaps = [gap] * num_arms
    per_instance: list[InstanceMistakeRate] = []
    with timer(f"Lower-bound run of {policy.name} on {num_arms + 1} instances"):
        for i in range(num_arms + 1):
            arms = make_tbp_instance(i, gaps)
            config = policy.resolve(TBP_THRESHOLD, n, arms)
            mistakes = sum(
                run_episode(arms, config, DelayModel.none(), n, derive_seed(root_seed, SeedPurpose.LOWER_BOUND, i, rep)).mistake
                for rep in range(replications)
            )
            per_instance.append(InstanceMistakeRate(instance=i, mistake_rate=mistakes / replications))
            logger.info("[LowerBound] Instance %d: mistake rate %.4f", i, mistakes / replications)

    h_evt = summarize(make_tbp_instance(0, gaps), TBP_THRESHOLD).h_evt
    report = LowerBoundReport(
        policy=policy.name,
        num_arms=num_arms,
        gap=gap,
        n=n,
        replications=replications,
        per_instance=tuple(per_instance),
        h_evt=h_evt,
        exponent=lower_bound_exponent(n, h_evt, num_arms),
        theoretical=lower_bound_mistake_probability(n, h_evt, num_arms),
    )
    level = LogLevel.INFO if report.holds else LogLevel.ERROR
    logger.highlight(
        level=level,
        message=f"[LowerBound] Empirical max {report.empirical_max:.4f} vs bound exp({report.exponent:.1f}) = {report.theoretical:.3g}.",
    )
    return report
