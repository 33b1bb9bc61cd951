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
"""Virtual-time episode engine for the thresholding bandit.

One round is one decision. Rewards are drawn when a pull is issued and become observable according to a delay model,
so the reward stream of an arm does not depend on the delay model, the policy or the other arms.
"""

from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from thc_threshold_bandit.bandit.policies import Classification, PolicyConfig, classify_means, select_from_table
from thc_threshold_bandit.bandit.stats import ArmStats, ArmStatsTable
from thc_threshold_bandit.errors import ConfigurationError, DomainError
from thc_threshold_bandit.observability import LogLevel, logger
from thc_threshold_bandit.utils.seeding import SeedPurpose, make_rng

_SUPPORT_TOLERANCE = 1e-12


class ArmKind(str, Enum):
    """Family of a reward distribution."""

    BERNOULLI = "bernoulli"
    UNIFORM_INTERVAL = "uniform_interval"
    POINT_MASS = "point_mass"


@dataclass(frozen=True)
class ArmModel:
    """True reward distribution of one arm, supported in [0, 1].

    Attributes:
        kind (ArmKind): Distribution family.
        mu (float): True mean (the success probability for Bernoulli arms, the value for point masses).
        half_width (float): Half-width ``r`` of ``U(mu - r, mu + r)``; 0 for the other families.
    """

    kind: ArmKind
    mu: float
    half_width: float = 0.0

    def __post_init__(self) -> None:
        """Check that the support lies in [0, 1]."""
        if not 0.0 <= self.mu <= 1.0:
            raise DomainError(f"Arm mean must lie in [0, 1], got {self.mu}")
        if self.kind is ArmKind.UNIFORM_INTERVAL:
            if self.half_width < 0.0:
                raise DomainError(f"Half-width must be non-negative, got {self.half_width}")
            if self.mu - self.half_width < -_SUPPORT_TOLERANCE or self.mu + self.half_width > 1.0 + _SUPPORT_TOLERANCE:
                raise DomainError(f"U({self.mu} - {self.half_width}, {self.mu} + {self.half_width}) leaves [0, 1]")
        elif self.half_width != 0.0:
            raise DomainError(f"Only uniform arms have a half-width, got {self.half_width} for {self.kind.value}")

    @classmethod
    def bernoulli(cls, p: float) -> "ArmModel":
        """Bernoulli(p) arm."""
        return cls(kind=ArmKind.BERNOULLI, mu=p)

    @classmethod
    def uniform_interval(cls, mu: float, r: float) -> "ArmModel":
        """Uniform arm on ``[mu - r, mu + r]``."""
        return cls(kind=ArmKind.UNIFORM_INTERVAL, mu=mu, half_width=r)

    @classmethod
    def point_mass(cls, v: float) -> "ArmModel":
        """Deterministic arm always paying ``v``."""
        return cls(kind=ArmKind.POINT_MASS, mu=v)

    @property
    def sigma_sq(self) -> float:
        """True variance."""
        if self.kind is ArmKind.BERNOULLI:
            return self.mu * (1.0 - self.mu)
        if self.kind is ArmKind.UNIFORM_INTERVAL:
            return self.half_width * self.half_width / 3.0
        return 0.0

    @property
    def support(self) -> tuple[float, float]:
        """Smallest and largest possible reward."""
        if self.kind is ArmKind.BERNOULLI:
            return 0.0, 1.0
        return max(self.mu - self.half_width, 0.0), min(self.mu + self.half_width, 1.0)

    def from_uniform(self, u: float) -> float:
        """Map a uniform draw ``u`` in [0, 1) to a reward.

        Args:
            u (float): Uniform draw.

        Returns:
            float: The reward, clipped to [0, 1] against rounding.
        """
        if self.kind is ArmKind.BERNOULLI:
            return 1.0 if u < self.mu else 0.0
        if self.kind is ArmKind.UNIFORM_INTERVAL:
            return min(max(self.mu - self.half_width + 2.0 * self.half_width * u, 0.0), 1.0)
        return self.mu

    def from_uniforms(self, u: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Vectorized :meth:`from_uniform`."""
        if self.kind is ArmKind.BERNOULLI:
            return (u < self.mu).astype(np.float64)
        if self.kind is ArmKind.UNIFORM_INTERVAL:
            return np.clip(self.mu - self.half_width + 2.0 * self.half_width * u, 0.0, 1.0)
        return np.full(u.shape, self.mu, dtype=np.float64)


def sample_reward(model: ArmModel, rng: np.random.Generator) -> float:
    """Draw one reward, advancing ``rng`` by one uniform draw.

    Args:
        model (ArmModel): The arm.
        rng (np.random.Generator): Generator to draw from.

    Returns:
        float: A reward in [0, 1].
    """
    return model.from_uniform(float(rng.random()))


def threshold_set(arms: Sequence[ArmModel], b: float) -> frozenset[int]:
    """Arms whose true mean is at least ``b``."""
    return frozenset(arm for arm, model in enumerate(arms) if model.mu >= b)


class RewardStream:
    """Reward generator of one arm within one episode.

    The stream of arm ``k`` is seeded from ``(seed, REWARDS, k)``, so its ``j``-th reward is the same whatever the
    policy, the delay model or the number of other arms.
    """

    def __init__(self, model: ArmModel, seed: int, arm: int, block_size: int = 256) -> None:
        """Initialize the stream.

        Args:
            model (ArmModel): The arm's distribution.
            seed (int): Episode seed.
            arm (int): Arm index.
            block_size (int): Number of uniforms drawn from the generator at a time.
        """
        self.model = model
        self._rng = make_rng(seed, SeedPurpose.REWARDS, arm)
        self._block_size = block_size
        self._buffer: list[float] = []
        self._pos = 0

    def draw(self) -> float:
        """Next reward of the stream."""
        if self._pos == len(self._buffer):
            self._buffer = self._rng.random(self._block_size).tolist()
            self._pos = 0
        u = self._buffer[self._pos]
        self._pos += 1
        return self.model.from_uniform(u)


class DelayKind(str, Enum):
    """How issued pulls become observable."""

    NONE = "none"
    FIXED = "fixed"
    MAX_PENDING = "max_pending"


@dataclass(frozen=True)
class DelayModel:
    """Rule deciding when an issued pull's reward is observed.

    ``FIXED`` makes a pull issued at round ``t`` observable from round ``t + d`` on. ``MAX_PENDING`` keeps at most
    ``tau_max`` pulls in flight, the one about to be issued included: before each decision the oldest pulls resolve
    until ``tau_max - 1`` remain pending, so ``max_pending(1)`` is the same as no delay.

    Attributes:
        kind (DelayKind): The rule.
        d (int): Delay in rounds for ``FIXED``.
        tau_max (int): Number of pulls in flight for ``MAX_PENDING``, like ``tau_max`` parallel agents.
    """

    kind: DelayKind = DelayKind.NONE
    d: int = 0
    tau_max: int = 0

    def __post_init__(self) -> None:
        """Validate the parameters."""
        if self.d < 0 or self.tau_max < 0:
            raise ConfigurationError(f"Delay parameters must be non-negative, got d={self.d}, tau_max={self.tau_max}")
        if self.kind is not DelayKind.FIXED and self.d != 0:
            raise ConfigurationError(f"Only fixed delays take d, got d={self.d} for {self.kind.value}")
        if self.kind is not DelayKind.MAX_PENDING and self.tau_max != 0:
            raise ConfigurationError(f"Only max_pending delays take tau_max, got tau_max={self.tau_max} for {self.kind.value}")

    @classmethod
    def none(cls) -> "DelayModel":
        """Every reward is observed before the next decision."""
        return cls()

    @classmethod
    def fixed(cls, d: int) -> "DelayModel":
        """Rewards are observed ``d`` rounds after their pull."""
        return cls(kind=DelayKind.FIXED, d=d)

    @classmethod
    def max_pending(cls, tau: int) -> "DelayModel":
        """At most ``tau`` pulls are in flight, so at most ``tau - 1`` are pending at a decision."""
        return cls(kind=DelayKind.MAX_PENDING, tau_max=tau)

    @property
    def descriptor(self) -> str:
        """Short label used in reports, e.g. ``fixed(3)``."""
        if self.kind is DelayKind.FIXED:
            return f"fixed({self.d})"
        if self.kind is DelayKind.MAX_PENDING:
            return f"max_pending({self.tau_max})"
        return "none"

    @property
    def cap(self) -> int:
        """Upper bound on the total pending pulls at a decision point."""
        if self.kind is DelayKind.FIXED:
            return max(self.d - 1, 0)
        if self.kind is DelayKind.MAX_PENDING:
            return max(self.tau_max - 1, 0)
        return 0

    def due_round(self, issue_round: int) -> int | None:
        """Round from which a pull issued at ``issue_round`` is observable; None when only the cap resolves it."""
        if self.kind is DelayKind.MAX_PENDING:
            return None
        return issue_round + self.d


class PendingPull(NamedTuple):
    """A pull whose reward was drawn but is not observed yet."""

    arm: int
    issue_round: int
    due_round: int | None
    reward: float


class PendingQueue:
    """In-flight pulls in issue order."""

    def __init__(self) -> None:
        """Create an empty queue."""
        self._entries: deque[PendingPull] = deque()

    def __len__(self) -> int:
        """Number of pending pulls."""
        return len(self._entries)

    def push(self, pull: PendingPull) -> None:
        """Append a freshly issued pull."""
        self._entries.append(pull)

    def peek(self) -> PendingPull:
        """The oldest pending pull."""
        return self._entries[0]

    def pop_oldest(self) -> PendingPull:
        """Remove and return the oldest pending pull."""
        return self._entries.popleft()


def resolve_due_pulls(pending_queue: PendingQueue, t: int) -> list[tuple[int, float]]:
    """Remove every pull observable at round ``t``.

    Due rounds grow with issue rounds, so scanning from the oldest entry finds all of them.

    Args:
        pending_queue (PendingQueue): The in-flight pulls.
        t (int): Current round.

    Returns:
        list[tuple[int, float]]: ``(arm, reward)`` pairs in issue order.
    """
    resolved: list[tuple[int, float]] = []
    while pending_queue:
        due = pending_queue.peek().due_round
        if due is None or due > t:
            break
        pull = pending_queue.pop_oldest()
        resolved.append((pull.arm, pull.reward))
    return resolved


def resolve_over_cap(pending_queue: PendingQueue, cap: int) -> list[tuple[int, float]]:
    """Remove the oldest pulls until at most ``cap`` remain.

    Args:
        pending_queue (PendingQueue): The in-flight pulls.
        cap (int): Maximum number of pulls left pending.

    Returns:
        list[tuple[int, float]]: ``(arm, reward)`` pairs in issue order.
    """
    resolved: list[tuple[int, float]] = []
    while len(pending_queue) > cap:
        pull = pending_queue.pop_oldest()
        resolved.append((pull.arm, pull.reward))
    return resolved


@dataclass(frozen=True)
class EpisodeResult:  # pylint: disable=too-many-instance-attributes
    """Trace and outcome of one episode.

    Attributes:
        pulls (tuple[int, ...]): Arms pulled after the initialization pulls.
        classification (Classification): Final classification from observed rewards.
        mistake (bool): Whether the classification differs from the true set of arms above the threshold.
        max_total_pending (int): Largest total number of pending pulls seen at a decision point.
        max_pending_ratio (float): Largest pending-over-observed ratio of any arm at a decision point.
        final_stats (tuple[ArmStats, ...]): Per-arm statistics at the end of the episode.
        true_above (frozenset[int]): Arms whose true mean is at least the threshold.
    """

    pulls: tuple[int, ...]
    classification: Classification
    mistake: bool
    max_total_pending: int
    max_pending_ratio: float
    final_stats: tuple[ArmStats, ...]
    true_above: frozenset[int]


def _validate_episode(arms: Sequence[ArmModel], config: PolicyConfig, n: int) -> None:
    if not arms:
        raise ConfigurationError("An episode needs at least one arm")
    if n <= 2 * len(arms):
        logger.highlight(level=LogLevel.ERROR, message=f"[Episode] Budget n={n} must exceed 2K={2 * len(arms)}.")
        raise ConfigurationError(f"Budget n={n} must exceed 2K={2 * len(arms)}")
    if config.kind.is_parameter_dependent and (config.a is None or not config.a > 0.0):
        raise ConfigurationError(f"{config.kind.value} needs a positive exploration parameter a, got {config.a}")


def run_episode(  # pylint: disable=too-many-locals
    arms: Sequence[ArmModel],
    config: PolicyConfig,
    delay: DelayModel,
    n: int,
    seed: int,
) -> EpisodeResult:
    """Run one fixed-budget episode.

    Each arm is first pulled twice with the rewards observed immediately. Then, for rounds ``t = 2K .. n-1``, due
    rewards are resolved, the policy picks an arm from the observed statistics and pending counts, and the pull is
    issued with its reward drawn now and observed later. At round ``n`` the arms are classified on observed rewards
    only.

    Args:
        arms (Sequence[ArmModel]): True arm distributions.
        config (PolicyConfig): The policy, with ``a`` resolved for parameter-dependent kinds.
        delay (DelayModel): When rewards become observable.
        n (int): Total budget of pulls, greater than ``2K``.
        seed (int): Episode seed; the result is a pure function of all arguments.

    Returns:
        EpisodeResult: The episode trace.

    Raises:
        ConfigurationError: If ``n <= 2K``, there are no arms, or ``a`` is missing.
    """
    _validate_episode(arms, config, n)
    num_arms = len(arms)
    streams = [RewardStream(model, seed, arm) for arm, model in enumerate(arms)]
    table = ArmStatsTable(num_arms)
    for _ in range(2):
        for arm, stream in enumerate(streams):
            table.issue(arm)
            table.observe(arm, stream.draw())

    queue = PendingQueue()
    pulls: list[int] = []
    issued = observed = 2 * num_arms
    max_total_pending = 0
    max_pending_ratio = 0.0
    cap = delay.cap
    for t in range(2 * num_arms, n):
        resolved = resolve_due_pulls(queue, t)
        if delay.kind is DelayKind.MAX_PENDING:
            resolved += resolve_over_cap(queue, cap)
        for arm, reward in resolved:
            table.observe(arm, reward)
        observed += len(resolved)

        total_pending = len(queue)
        assert observed + total_pending == issued, "observed plus pending pulls must equal issued pulls"
        assert total_pending <= cap, f"{total_pending} pending pulls exceed the cap of {delay.descriptor}"
        if total_pending:
            max_total_pending = max(max_total_pending, total_pending)
            max_pending_ratio = max(max_pending_ratio, float(np.max(table.pending / table.observed)))

        arm = select_from_table(table, config)
        table.issue(arm)
        queue.push(PendingPull(arm=arm, issue_round=t, due_round=delay.due_round(t), reward=streams[arm].draw()))
        issued += 1
        pulls.append(arm)

    classification = classify_means(table.means, config.b)
    true_above = threshold_set(arms, config.b)
    result = EpisodeResult(
        pulls=tuple(pulls),
        classification=classification,
        mistake=classification.above != true_above,
        max_total_pending=max_total_pending,
        max_pending_ratio=max_pending_ratio,
        final_stats=table.snapshots(),
        true_above=true_above,
    )
    logger.debug(
        "[Episode] %s K=%d n=%d delay=%s seed=%d mistake=%s max_pending=%d",
        config.kind.value,
        num_arms,
        n,
        delay.descriptor,
        seed,
        result.mistake,
        result.max_total_pending,
    )
    return result
