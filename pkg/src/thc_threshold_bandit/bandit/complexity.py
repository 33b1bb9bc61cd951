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
"""Problem-complexity constants, required-round formulas and hard-instance helpers.

With gaps ``D_k = |mu_k - b|`` and variances ``V_k``:

    H_ATP        = sum D_k^-2
    H_EVT        = sum (V_k D_k^-2 + D_k^-1)
    H_AP_EVT     = (1 + delta * eta)^2 * H_EVT
    H_AP_EVT_PF  = (1 + delta * eta) * H_EVT

Every arm supported in [0, 1] satisfies ``V_k + D_k <= 1``, hence ``H_EVT <= H_ATP``.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from thc_threshold_bandit.bandit.env import ArmModel
from thc_threshold_bandit.bandit.policies import PolicyKind
from thc_threshold_bandit.errors import ConfigurationError, DegenerateInstanceError, DomainError, PreconditionError
from thc_threshold_bandit.observability import LogLevel, logger
from thc_threshold_bandit.utils.seeding import SeedPurpose, make_rng

TBP_THRESHOLD = 0.5
MAX_TBP_GAP = 0.25


def _evt_term(variance: float, gap: float) -> float:
    # (V + D) / D^2 keeps the per-arm term below 1 / D^2 under rounding whenever V + D <= 1
    return (variance + gap) / (gap * gap)


@dataclass(frozen=True)
class ProblemSummary:
    """Gaps and variances of an instance, and the complexity constants derived from them.

    Attributes:
        gaps (tuple[float, ...]): ``|mu_k - b|`` per arm, all positive.
        variances (tuple[float, ...]): True variance per arm.
    """

    gaps: tuple[float, ...]
    variances: tuple[float, ...]

    def __post_init__(self) -> None:
        """Reject zero gaps and mismatched lengths."""
        if len(self.gaps) != len(self.variances):
            raise DomainError(f"{len(self.gaps)} gaps but {len(self.variances)} variances")
        if not self.gaps:
            raise DomainError("An instance needs at least one arm")
        for arm, gap in enumerate(self.gaps):
            if not gap > 0.0:
                logger.highlight(level=LogLevel.ERROR, message=f"[Complexity] Arm {arm} sits on the threshold.")
                raise DegenerateInstanceError(f"Arm {arm} has gap {gap}; every gap must be positive")

    @property
    def num_arms(self) -> int:
        """Number of arms K."""
        return len(self.gaps)

    @property
    def h_atp(self) -> float:
        """``sum D_k^-2``."""
        return math.fsum(1.0 / (gap * gap) for gap in self.gaps)

    @property
    def h_evt(self) -> float:
        """``sum (V_k D_k^-2 + D_k^-1)``."""
        return math.fsum(_evt_term(variance, gap) for variance, gap in zip(self.variances, self.gaps))

    def h_ap_evt(self, delta: float, eta: float) -> float:
        """``(1 + delta * eta)^2 * H_EVT``."""
        factor = 1.0 + delta * eta
        return factor * factor * self.h_evt

    def h_ap_evt_pf(self, delta: float, eta: float) -> float:
        """``(1 + delta * eta) * H_EVT``."""
        return (1.0 + delta * eta) * self.h_evt

    def h_for(self, kind: PolicyKind, delta: float = 0.0, eta: float = 0.0) -> float:
        """Complexity constant governing the given policy.

        Args:
            kind (PolicyKind): The policy.
            delta (float): Weight of pending pulls.
            eta (float): Bound on the pending-over-observed ratio.

        Returns:
            float: The matching H.
        """
        if kind is PolicyKind.ATP:
            return self.h_atp
        if kind is PolicyKind.AP_EVT:
            return self.h_ap_evt(delta, eta)
        if kind is PolicyKind.AP_EVT_PF:
            return self.h_ap_evt_pf(delta, eta)
        return self.h_evt


def summarize(arms: Sequence[ArmModel], b: float) -> ProblemSummary:
    """Compute the gaps and variances of an instance.

    Args:
        arms (Sequence[ArmModel]): True arm distributions.
        b (float): The threshold.

    Returns:
        ProblemSummary: The instance's complexity summary.

    Raises:
        DegenerateInstanceError: If some arm's mean equals ``b``.
    """
    return ProblemSummary(
        gaps=tuple(abs(arm.mu - b) for arm in arms),
        variances=tuple(arm.sigma_sq for arm in arms),
    )


def required_rounds(  # pylint: disable=too-many-arguments
    summary: ProblemSummary,
    kind: PolicyKind,
    epsilon: float,
    big_theta: float,
    n_probe: float,
    num_arms: int,
    tau: int = 0,
    delta: float = 0.0,
    eta: float = 0.0,
) -> float:
    """Budget after which the error bound of a policy drops below ``epsilon``.

    ``big_theta * H * (log(n_probe * K) + log(1 / epsilon))``, plus ``(1 - delta) * tau`` for AP_EVT and AP_EVT_PF.
    EVT_BERNSTEIN is bounded like EVT. The constant ``big_theta`` is not known and must be supplied.

    Args:
        summary (ProblemSummary): The instance.
        kind (PolicyKind): The policy.
        epsilon (float): Target error probability in (0, 1).
        big_theta (float): Positive constant of the bound.
        n_probe (float): Budget inside the logarithm.
        num_arms (int): Number of arms K inside the logarithm.
        tau (int): Bound on the total pending pulls.
        delta (float): Weight of pending pulls.
        eta (float): Bound on the pending-over-observed ratio.

    Returns:
        float: The required number of rounds.

    Raises:
        DomainError: If ``epsilon`` is outside (0, 1) or ``big_theta`` is not positive.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not big_theta > 0.0:
        raise DomainError(f"big_theta must be positive, got {big_theta}")
    rounds = big_theta * summary.h_for(kind, delta, eta) * (math.log(n_probe * num_arms) + math.log(1.0 / epsilon))
    if kind in (PolicyKind.AP_EVT, PolicyKind.AP_EVT_PF):
        rounds += (1.0 - delta) * tau
    return rounds


def theoretical_a(  # pylint: disable=too-many-arguments
    summary: ProblemSummary,
    kind: PolicyKind,
    n: int,
    tau: int = 0,
    delta: float = 0.0,
    eta: float = 0.0,
) -> float:
    """Exploration parameter for which the error bound of a parameter-dependent policy holds.

    ``n / H_EVT`` for EVT and EVT_BERNSTEIN, ``(n - (1 - delta) * tau) / H_AP_EVT`` for AP_EVT.

    Raises:
        ConfigurationError: If the policy takes no ``a`` or the result is not positive.
    """
    if not kind.is_parameter_dependent:
        raise ConfigurationError(f"{kind.value} takes no exploration parameter")
    if kind is PolicyKind.AP_EVT:
        a = (n - (1.0 - delta) * tau) / summary.h_ap_evt(delta, eta)
    else:
        a = n / summary.h_evt
    if not a > 0.0:
        raise ConfigurationError(f"Budget n={n} leaves no exploration for tau={tau}, delta={delta}")
    return a


def kl_bernoulli_gap(delta_k: float) -> float:
    """``D * log((1/2 + D) / (1/2 - D))`` for Bernoulli arms at gap ``D`` around 1/2.

    Args:
        delta_k (float): Gap in (0, 1/4].

    Returns:
        float: The divergence between ``Ber(1/2 + D)`` and ``Ber(1/2 - D)`` as used by the lower bound.

    Raises:
        DomainError: If the gap is outside (0, 1/4].
    """
    if not 0.0 < delta_k <= MAX_TBP_GAP:
        raise DomainError(f"Gap must lie in (0, {MAX_TBP_GAP}], got {delta_k}")
    return delta_k * math.log((0.5 + delta_k) / (0.5 - delta_k))


def bernoulli_kl(p: float, q: float) -> float:
    """Directed divergence ``KL(Ber(p), Ber(q))`` with ``0 log 0 = 0``.

    Args:
        p (float): Success probability in [0, 1].
        q (float): Success probability in (0, 1).

    Returns:
        float: The divergence in nats.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    kl = 0.0
    if p > 0.0:
        kl += p * math.log(p / q)
    if p < 1.0:
        kl += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return kl


def make_tbp_instance(i: int, gaps: Sequence[float]) -> list[ArmModel]:
    """Bernoulli hard instance around the threshold 1/2.

    Instance 0 puts every arm at ``1/2 + D_k``. Instance ``i >= 1`` moves the ``i``-th arm (1-based) to
    ``1/2 - D_i``. All ``K + 1`` instances share the same gaps.

    Args:
        i (int): Instance number in ``0..K``.
        gaps (Sequence[float]): One gap in (0, 1/4] per arm.

    Returns:
        list[ArmModel]: The arms.

    Raises:
        DomainError: If ``i`` or a gap is out of range.
    """
    if not gaps:
        raise DomainError("A hard instance needs at least one arm")
    if not 0 <= i <= len(gaps):
        raise DomainError(f"Instance number must lie in 0..{len(gaps)}, got {i}")
    for gap in gaps:
        if not 0.0 < gap <= MAX_TBP_GAP:
            raise DomainError(f"Gap must lie in (0, {MAX_TBP_GAP}], got {gap}")
    return [
        ArmModel.bernoulli(TBP_THRESHOLD - gap if arm == i - 1 else TBP_THRESHOLD + gap) for arm, gap in enumerate(gaps)
    ]


def check_variance_gap_bound(samples: Sequence[tuple[float, float, float]]) -> bool:
    """Check ``V + |mu - b| <= 1`` and ``V D^-2 + D^-1 <= D^-2`` on admissible samples.

    Args:
        samples (Sequence[tuple[float, float, float]]): ``(mu, sigma_sq, b)`` triples with ``mu, b`` in [0, 1] and
            ``0 <= sigma_sq <= mu - mu^2``.

    Returns:
        bool: Whether both inequalities hold for every sample; the second is skipped at zero gap.

    Raises:
        DomainError: If a sample is not admissible.
    """
    holds = True
    for mu, sigma_sq, b in samples:
        if not (0.0 <= mu <= 1.0 and 0.0 <= b <= 1.0):
            raise DomainError(f"Mean and threshold must lie in [0, 1], got mu={mu}, b={b}")
        if not 0.0 <= sigma_sq <= mu - mu * mu:
            raise DomainError(f"Variance {sigma_sq} is not attainable in [0, 1] with mean {mu}")
        gap = abs(mu - b)
        holds = holds and sigma_sq + gap <= 1.0
        if gap > 0.0:
            holds = holds and _evt_term(sigma_sq, gap) <= 1.0 / (gap * gap)
    return holds


def lower_bound_exponent(n: int, h: float, num_arms: int) -> float:
    """``-10 n / h - 16 log(5 n K)``, the logarithm of :func:`lower_bound_mistake_probability`."""
    if not h > 0.0:
        raise DomainError(f"Complexity must be positive, got {h}")
    return -10.0 * n / h - 16.0 * math.log(5.0 * n * num_arms)


def lower_bound_mistake_probability(n: int, h: float, num_arms: int) -> float:
    """Minimax lower bound ``exp(-10 n / h - 16 log(5 n K))`` on the error probability.

    Underflows to 0 at most practical budgets; report :func:`lower_bound_exponent` alongside.
    """
    return math.exp(lower_bound_exponent(n, h, num_arms))


def _require_rounds(t: int) -> None:
    if t < 1:
        logger.highlight(level=LogLevel.ERROR, message=f"[Complexity] Radius needs at least one sample, got t={t}.")
        raise PreconditionError(f"Radius needs at least one sample, got t={t}")


def a1_radius(sigma_hat: float, a: float, t: int) -> float:
    """Empirical-Bernstein radius of the mean, ``sqrt(2 s^2 a / t) + (3 - sqrt(2)) a / t``."""
    _require_rounds(t)
    return math.sqrt(2.0 * sigma_hat * sigma_hat * a / t) + (3.0 - math.sqrt(2.0)) * a / t


def a2_radius(a: float, t: int) -> float:
    """Radius of the standard deviation, ``sqrt(a / (4 t))``."""
    _require_rounds(t)
    return math.sqrt(a / (4.0 * t))


def concentration_lower_bound(n: int, num_arms: int, a: float) -> float:
    """Lower bound ``1 - 5 n K exp(-a / 8)`` on the probability that both radii hold, floored at 0."""
    return max(0.0, 1.0 - 5.0 * n * num_arms * math.exp(-a / 8.0))


@dataclass(frozen=True)
class ConcentrationEstimate:
    """Monte Carlo frequencies of the concentration events.

    Attributes:
        mean_rate (float): Frequency of every running mean staying within :func:`a1_radius`.
        sigma_rate (float): Frequency of every running standard deviation staying within :func:`a2_radius`.
        joint_rate (float): Frequency of both at once.
        lower_bound (float): :func:`concentration_lower_bound` for the same parameters.
        replications (int): Number of simulated reward streams.
    """

    mean_rate: float
    sigma_rate: float
    joint_rate: float
    lower_bound: float
    replications: int


def estimate_concentration(arms: Sequence[ArmModel], a: float, n: int, replications: int, seed: int) -> ConcentrationEstimate:
    """Estimate how often the running statistics of i.i.d. reward streams stay within their radii.

    For each replication, every arm draws ``n`` rewards; the events require the radius to hold for all arms and all
    prefixes ``t = 1..n``.

    Args:
        arms (Sequence[ArmModel]): True arm distributions.
        a (float): Exploration parameter, positive.
        n (int): Stream length.
        replications (int): Number of replications.
        seed (int): Root seed.

    Returns:
        ConcentrationEstimate: The frequencies and the matching lower bound.
    """
    if not a > 0.0:
        raise DomainError(f"a must be positive, got {a}")
    if n < 1 or replications < 1:
        raise DomainError(f"n and replications must be positive, got n={n}, replications={replications}")
    t = np.arange(1, n + 1, dtype=np.float64)
    sigma_radius = np.sqrt(a / (4.0 * t))
    mean_hits = sigma_hits = joint_hits = 0
    for rep in range(replications):
        mean_ok = sigma_ok = True
        for arm, model in enumerate(arms):
            rewards = model.from_uniforms(make_rng(seed, SeedPurpose.CONCENTRATION, rep, arm).random(n))
            means = np.cumsum(rewards) / t
            sigmas = np.sqrt(np.maximum(np.cumsum(rewards * rewards) / t - means * means, 0.0))
            mean_radius = np.sqrt(2.0 * sigmas * sigmas * a / t) + (3.0 - math.sqrt(2.0)) * a / t
            mean_ok = mean_ok and bool(np.all(np.abs(means - model.mu) <= mean_radius))
            sigma_ok = sigma_ok and bool(np.all(np.abs(sigmas - math.sqrt(model.sigma_sq)) <= sigma_radius))
        mean_hits += mean_ok
        sigma_hits += sigma_ok
        joint_hits += mean_ok and sigma_ok
    return ConcentrationEstimate(
        mean_rate=mean_hits / replications,
        sigma_rate=sigma_hits / replications,
        joint_rate=joint_hits / replications,
        lower_bound=concentration_lower_bound(n, len(arms), a),
        replications=replications,
    )


class InstanceSampler(Protocol):  # pylint: disable=too-few-public-methods
    """Anything that draws a random instance."""

    def draw(self, rng: np.random.Generator) -> list[ArmModel]:
        """Draw the arms of one instance."""


@dataclass(frozen=True)
class ExpectedSummary:
    """Average complexity constants over random instances.

    Attributes:
        h_atp (float): Mean of ``H_ATP`` over the kept draws.
        h_evt (float): Mean of ``H_EVT`` over the kept draws.
        draws (int): Number of kept draws.
        skipped (int): Draws discarded because an arm sat on the threshold.
    """

    h_atp: float
    h_evt: float
    draws: int
    skipped: int


def expected_summary(sampler: InstanceSampler, b: float, draws: int, seed: int) -> ExpectedSummary:
    """Monte Carlo expectation of the complexity constants over a random-instance recipe.

    Args:
        sampler (InstanceSampler): The recipe.
        b (float): The threshold.
        draws (int): Number of instances to draw.
        seed (int): Root seed.

    Returns:
        ExpectedSummary: The averages.

    Raises:
        DegenerateInstanceError: If every draw was degenerate.
    """
    if draws < 1:
        raise DomainError(f"draws must be positive, got {draws}")
    rng = make_rng(seed, SeedPurpose.SUMMARY)
    h_atp: list[float] = []
    h_evt: list[float] = []
    skipped = 0
    for _ in range(draws):
        try:
            summary = summarize(sampler.draw(rng), b)
        except DegenerateInstanceError:
            skipped += 1
            continue
        h_atp.append(summary.h_atp)
        h_evt.append(summary.h_evt)
    if not h_atp:
        raise DegenerateInstanceError("Every drawn instance had an arm on the threshold")
    if skipped:
        logger.highlight(level=LogLevel.WARNING, message=f"[Complexity] Skipped {skipped} degenerate draws.")
    return ExpectedSummary(h_atp=float(np.mean(h_atp)), h_evt=float(np.mean(h_evt)), draws=len(h_atp), skipped=skipped)
