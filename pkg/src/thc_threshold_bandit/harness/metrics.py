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
"""Rounds-to-accuracy and speedup of delayed runs over the fully observed baseline.

Unreachable targets are reported as None.
"""

from collections.abc import Sequence
from dataclasses import dataclass

from thc_threshold_bandit.bandit.env import DelayKind, DelayModel
from thc_threshold_bandit.errors import DomainError
from thc_threshold_bandit.harness.sweep import SweepRow


def speedup(rounds_full: int | None, rounds_delayed: int | None, tau: int) -> float | None:
    """``rounds_full / rounds_delayed * tau``: how many times faster ``tau`` parallel pulls reach the target.

    Args:
        rounds_full (int | None): Budget needed with every reward observed; None if unreachable.
        rounds_delayed (int | None): Budget needed with up to ``tau`` pulls in flight; None if unreachable.
        tau (int): Pending cap, at least 1.

    Returns:
        float | None: The speedup, or None if either budget is unreachable.

    Raises:
        DomainError: If a budget or ``tau`` is below 1.
    """
    if tau < 1:
        raise DomainError(f"tau must be at least 1, got {tau}")
    if rounds_full is None or rounds_delayed is None:
        return None
    if rounds_full < 1 or rounds_delayed < 1:
        raise DomainError(f"Round counts must be at least 1, got {rounds_full} and {rounds_delayed}")
    return rounds_full / rounds_delayed * tau


def rounds_to_accuracy(rows: Sequence[SweepRow], policy: str, delay: str, target: float) -> int | None:
    """Smallest budget of the grid whose success rate reaches ``target``.

    No interpolation between budgets; with a non-monotone curve the first crossing wins.

    Args:
        rows (Sequence[SweepRow]): Sweep rows.
        policy (str): Policy name.
        delay (str): Delay descriptor.
        target (float): Target success rate.

    Returns:
        int | None: The budget, or None if no budget reaches the target.
    """
    cell = sorted((row for row in rows if row.policy == policy and row.delay == delay), key=lambda row: row.n)
    return next((row.n for row in cell if row.success_rate >= target), None)


@dataclass(frozen=True)
class SpeedupRow:
    """Speedup of one pending cap.

    Attributes:
        policy (str): Policy name.
        delay (str): Delay descriptor.
        tau (int): Pending cap.
        rounds (int | None): Budget reaching the target under the cap.
        baseline_rounds (int | None): Budget reaching the target with full observations.
        speedup (float | None): See :func:`speedup`.
    """

    policy: str
    delay: str
    tau: int
    rounds: int | None
    baseline_rounds: int | None
    speedup: float | None


def speedup_table(
    rows: Sequence[SweepRow],
    policy: str,
    delays: Sequence[DelayModel],
    target: float,
    baseline: DelayModel | None = None,
) -> list[SpeedupRow]:
    """Speedup of every ``max_pending`` delay against the baseline of the same policy.

    Args:
        rows (Sequence[SweepRow]): Sweep rows.
        policy (str): Policy name.
        delays (Sequence[DelayModel]): Delays of the sweep; only ``max_pending`` caps of at least 1 are reported.
        target (float): Target success rate.
        baseline (DelayModel | None): Fully observed baseline, ``none`` by default.

    Returns:
        list[SpeedupRow]: One row per cap, in increasing ``tau``.
    """
    baseline_rounds = rounds_to_accuracy(rows, policy, (baseline or DelayModel.none()).descriptor, target)
    table: list[SpeedupRow] = []
    for delay in sorted(delays, key=lambda delay: delay.tau_max):
        if delay.kind is not DelayKind.MAX_PENDING or delay.tau_max < 1:
            continue
        rounds = rounds_to_accuracy(rows, policy, delay.descriptor, target)
        table.append(
            SpeedupRow(
                policy=policy,
                delay=delay.descriptor,
                tau=delay.tau_max,
                rounds=rounds,
                baseline_rounds=baseline_rounds,
                speedup=speedup(baseline_rounds, rounds, delay.tau_max),
            )
        )
    return table
