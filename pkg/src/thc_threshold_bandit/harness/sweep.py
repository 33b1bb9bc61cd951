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
"""Replicated sweeps over policies, budgets and delay models.

Replication ``r`` draws its instance from ``(root_seed, INSTANCE, r)`` and runs every cell with the episode seed
derived from ``(root_seed, EPISODE, r)``. Seeds never depend on the cell, so all policies face the same instances and
reward streams, and adding a policy leaves the others' episodes unchanged.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from thc_threshold_bandit.bandit.env import run_episode
from thc_threshold_bandit.errors import ConfigurationError, DegenerateInstanceError
from thc_threshold_bandit.harness.config import ExperimentConfig
from thc_threshold_bandit.observability import LogLevel, logger
from thc_threshold_bandit.utils.seeding import SeedPurpose, derive_seed, make_rng
from thc_threshold_bandit.utils.timer import timer

CellKey = tuple[str, int, str]


@dataclass(frozen=True)
class SweepRow:
    """Aggregate of one (policy, budget, delay) cell.

    Attributes:
        policy (str): Policy name.
        n (int): Budget.
        delay (str): Delay descriptor.
        success_rate (float): Fraction of episodes without a classification mistake.
        mean_max_pending (float): Mean over episodes of the largest total pending count.
        mean_pending_ratio (float): Mean over episodes of the largest pending-over-observed ratio.
        reps (int): Number of episodes.
    """

    policy: str
    n: int
    delay: str
    success_rate: float
    mean_max_pending: float
    mean_pending_ratio: float
    reps: int


@dataclass(frozen=True)
class CellFailure:
    """A cell that could not run, with the first replication's reason."""

    policy: str
    n: int
    delay: str
    reason: str


@dataclass(frozen=True)
class SweepResult:
    """Rows sorted by (policy, n, delay) and the cells that failed."""

    rows: tuple[SweepRow, ...]
    failures: tuple[CellFailure, ...]


@dataclass(frozen=True)
class _Outcome:
    mistake: bool
    max_total_pending: int
    max_pending_ratio: float


def _cells(config: ExperimentConfig) -> list[CellKey]:
    return [(policy.name, n, delay.descriptor) for policy in config.policies for n in config.budgets for delay in config.delays]


def run_replication(config: ExperimentConfig, rep: int) -> dict[CellKey, _Outcome | str]:
    """Run every cell of one replication.

    Args:
        config (ExperimentConfig): The experiment.
        rep (int): Replication index.

    Returns:
        dict[CellKey, _Outcome | str]: Per-cell outcome, or the reason the cell could not run.
    """
    instance_rep = 0 if config.fixed_instance else rep
    arms = config.instance.draw(make_rng(config.root_seed, SeedPurpose.INSTANCE, instance_rep))
    seed = derive_seed(config.root_seed, SeedPurpose.EPISODE, rep)
    outcomes: dict[CellKey, _Outcome | str] = {}
    for policy in config.policies:
        for n in config.budgets:
            for delay in config.delays:
                key = (policy.name, n, delay.descriptor)
                try:
                    result = run_episode(arms, policy.resolve(config.b, n, arms), delay, n, seed)
                except (ConfigurationError, DegenerateInstanceError) as exception:
                    outcomes[key] = str(exception)
                    continue
                outcomes[key] = _Outcome(result.mistake, result.max_total_pending, result.max_pending_ratio)
    logger.debug("[Sweep] Replication %d done", rep)
    return outcomes


def _aggregate(config: ExperimentConfig, replications: list[dict[CellKey, _Outcome | str]]) -> SweepResult:
    rows: list[SweepRow] = []
    failures: list[CellFailure] = []
    for key in _cells(config):
        outcomes = [replication[key] for replication in replications]
        reasons = [outcome for outcome in outcomes if isinstance(outcome, str)]
        if reasons:
            failures.append(CellFailure(*key, reason=reasons[0]))
            logger.highlight(level=LogLevel.WARNING, message=f"[Sweep] Cell {key} failed: {reasons[0]}")
            continue
        episodes = [outcome for outcome in outcomes if isinstance(outcome, _Outcome)]
        reps = len(episodes)
        row = SweepRow(
            *key,
            success_rate=sum(not episode.mistake for episode in episodes) / reps,
            mean_max_pending=sum(episode.max_total_pending for episode in episodes) / reps,
            mean_pending_ratio=sum(episode.max_pending_ratio for episode in episodes) / reps,
            reps=reps,
        )
        logger.info("[Sweep] %s n=%d delay=%s success_rate=%.4f", row.policy, row.n, row.delay, row.success_rate)
        rows.append(row)
    rows.sort(key=lambda row: (row.policy, row.n, row.delay))
    return SweepResult(rows=tuple(rows), failures=tuple(failures))


def run_sweep(config: ExperimentConfig, jobs: int = 1) -> SweepResult:
    """Run every (policy, budget, delay) cell over all replications.

    Invalid cells, e.g. a budget not exceeding ``2K``, are collected as failures and the sweep continues. The result
    depends only on the config: replications are gathered in index order whatever the number of workers.

    Args:
        config (ExperimentConfig): The experiment.
        jobs (int): Worker processes; 1 runs in-process.

    Returns:
        SweepResult: Sorted rows and failed cells.
    """
    if jobs < 1:
        raise ConfigurationError(f"jobs must be at least 1, got {jobs}")
    reps = range(config.replications)
    with timer(f"Sweep of {len(_cells(config))} cells x {config.replications} replications"):
        if jobs == 1:
            replications = [run_replication(config, rep) for rep in reps]
        else:
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                replications = list(executor.map(run_replication, [config] * len(reps), reps))
        return _aggregate(config, replications)
