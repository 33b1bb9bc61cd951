import numpy as np
import pytest

from thc_threshold_bandit.bandit.env import (
    ArmKind,
    ArmModel,
    DelayKind,
    DelayModel,
    PendingPull,
    PendingQueue,
    RewardStream,
    resolve_due_pulls,
    resolve_over_cap,
    run_episode,
    sample_reward,
    threshold_set,
)
from thc_threshold_bandit.bandit.policies import PolicyConfig, PolicyKind
from thc_threshold_bandit.errors import ConfigurationError, DomainError


def policy(kind, b=0.7, n=100, num_arms=2, delta=0.0):
    config = PolicyConfig(kind=kind, b=b, delta=delta)
    return config.with_a(n / num_arms) if kind.is_parameter_dependent else config


def random_arms(rng, num_arms):
    arms = []
    for _ in range(num_arms):
        mu = float(rng.uniform(0.2, 0.8))
        if rng.random() < 0.5:
            arms.append(ArmModel.bernoulli(mu))
        else:
            arms.append(ArmModel.uniform_interval(mu, float(rng.uniform(0.0, min(mu, 1.0 - mu)))))
    return arms


class TestArmModel:
    """Arm distributions."""

    def test_variances(self):
        assert ArmModel.bernoulli(0.75).sigma_sq == pytest.approx(0.1875)
        assert ArmModel.uniform_interval(0.5, 0.3).sigma_sq == pytest.approx(0.03)
        assert ArmModel.point_mass(0.2).sigma_sq == 0.0

    def test_support(self):
        assert ArmModel.uniform_interval(0.5, 0.2).support == pytest.approx((0.3, 0.7))
        assert ArmModel.bernoulli(0.1).support == (0.0, 1.0)
        assert ArmModel.point_mass(0.4).support == (0.4, 0.4)

    @pytest.mark.parametrize(
        "factory",
        [
            lambda: ArmModel.uniform_interval(0.9, 0.2),
            lambda: ArmModel.uniform_interval(0.1, 0.2),
            lambda: ArmModel.uniform_interval(0.5, -0.1),
            lambda: ArmModel.bernoulli(1.2),
            lambda: ArmModel.point_mass(-0.5),
            lambda: ArmModel(kind=ArmKind.BERNOULLI, mu=0.5, half_width=0.1),
        ],
    )
    def test_support_outside_unit_interval(self, factory):
        with pytest.raises(DomainError):
            factory()

    def test_from_uniforms_matches_scalar(self):
        u = np.random.default_rng(0).random(100)
        for model in (ArmModel.bernoulli(0.3), ArmModel.uniform_interval(0.6, 0.4), ArmModel.point_mass(0.9)):
            assert model.from_uniforms(u).tolist() == [model.from_uniform(float(x)) for x in u]


class TestSampleReward:
    """Reward draws."""

    def test_point_mass(self):
        rng = np.random.default_rng(1)
        assert all(sample_reward(ArmModel.point_mass(0.7), rng) == 0.7 for _ in range(100))

    def test_certain_bernoulli(self):
        rng = np.random.default_rng(2)
        assert all(sample_reward(ArmModel.bernoulli(1.0), rng) == 1.0 for _ in range(100))

    def test_uniform_moments(self):
        rng = np.random.default_rng(3)
        draws = np.array([sample_reward(ArmModel.uniform_interval(0.5, 0.2), rng) for _ in range(100_000)])
        assert abs(draws.mean() - 0.5) < 0.005
        assert abs(draws.var() - 0.04 / 3) < 0.1 * 0.04 / 3
        assert draws.min() >= 0.3
        assert draws.max() <= 0.7

    def test_advances_generator(self):
        rng = np.random.default_rng(4)
        first, second = sample_reward(ArmModel.bernoulli(0.5), rng), sample_reward(ArmModel.uniform_interval(0.5, 0.5), rng)
        replay = np.random.default_rng(4)
        assert first == ArmModel.bernoulli(0.5).from_uniform(float(replay.random()))
        assert second == ArmModel.uniform_interval(0.5, 0.5).from_uniform(float(replay.random()))


def test_reward_stream_depends_only_on_seed_and_arm():
    model = ArmModel.uniform_interval(0.5, 0.3)
    stream, replay = RewardStream(model, seed=5, arm=2), RewardStream(model, seed=5, arm=2, block_size=3)
    assert [stream.draw() for _ in range(600)] == [replay.draw() for _ in range(600)]
    assert RewardStream(model, seed=5, arm=2).draw() != RewardStream(model, seed=5, arm=3).draw()


class TestDelayModel:
    """Delay rules."""

    def test_descriptors(self):
        assert DelayModel.none().descriptor == "none"
        assert DelayModel.fixed(3).descriptor == "fixed(3)"
        assert DelayModel.max_pending(16).descriptor == "max_pending(16)"

    def test_fixed_due_round(self):
        """A pull issued at round 10 with delay 3 is visible from round 13."""
        assert DelayModel.fixed(3).due_round(10) == 13
        assert DelayModel.max_pending(4).due_round(10) is None

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kind": DelayKind.FIXED, "d": -1},
            {"kind": DelayKind.MAX_PENDING, "tau_max": -2},
            {"kind": DelayKind.NONE, "d": 3},
            {"kind": DelayKind.FIXED, "d": 1, "tau_max": 2},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            DelayModel(**kwargs)


class TestResolveDuePulls:
    """Pending-queue resolution."""

    def test_fixed_delay_off_by_one(self):
        queue = PendingQueue()
        queue.push(PendingPull(arm=1, issue_round=10, due_round=13, reward=0.25))
        assert resolve_due_pulls(queue, 12) == []
        assert len(queue) == 1
        assert resolve_due_pulls(queue, 13) == [(1, 0.25)]
        assert len(queue) == 0

    def test_issue_order(self):
        queue = PendingQueue()
        for t, arm in enumerate([2, 0, 1, 0]):
            queue.push(PendingPull(arm=arm, issue_round=t, due_round=t + 1, reward=t / 10))
        assert resolve_due_pulls(queue, 3) == [(2, 0.0), (0, 0.1), (1, 0.2)]
        assert resolve_due_pulls(queue, 10) == [(0, 0.3)]

    def test_cap_only_pulls_never_due(self):
        queue = PendingQueue()
        queue.push(PendingPull(arm=0, issue_round=0, due_round=None, reward=1.0))
        assert resolve_due_pulls(queue, 10**9) == []

    def test_cap_resolves_oldest_before_fifth_decision(self):
        queue = PendingQueue()
        cap = DelayModel.max_pending(4).cap
        for t in range(4):
            assert resolve_over_cap(queue, cap) == []
            queue.push(PendingPull(arm=t, issue_round=t, due_round=None, reward=0.5))
        assert resolve_over_cap(queue, cap) == [(0, 0.5)]
        assert len(queue) == 3


class TestRunEpisode:
    """The episode loop."""

    @pytest.mark.parametrize("kind", list(PolicyKind))
    def test_deterministic_arm_above_threshold(self, kind):
        result = run_episode([ArmModel.point_mass(0.9)], policy(kind, n=10, num_arms=1), DelayModel.none(), 10, seed=0)
        assert result.classification.above == frozenset({0})
        assert not result.mistake
        assert len(result.pulls) == 8
        assert result.true_above == frozenset({0})

    def test_no_delay_has_no_pending(self):
        arms = [ArmModel.bernoulli(0.9), ArmModel.bernoulli(0.5)]
        result = run_episode(arms, policy(PolicyKind.AP_EVT, delta=1.0), DelayModel.none(), 100, seed=3)
        assert result.max_total_pending == 0
        assert result.max_pending_ratio == 0.0

    def test_easy_instance_is_classified(self):
        arms = [ArmModel.bernoulli(0.9), ArmModel.bernoulli(0.5)]
        config = policy(PolicyKind.ATP, n=200)
        mistakes = sum(run_episode(arms, config, DelayModel.none(), 200, seed=seed).mistake for seed in range(100))
        assert mistakes <= 1

    def test_deterministic(self):
        arms = random_arms(np.random.default_rng(0), 5)
        config = policy(PolicyKind.AP_EVT, b=0.5, n=300, num_arms=5, delta=0.5)
        first = run_episode(arms, config, DelayModel.fixed(4), 300, seed=42)
        assert run_episode(arms, config, DelayModel.fixed(4), 300, seed=42) == first
        assert run_episode(arms, config, DelayModel.fixed(4), 300, seed=43).pulls != first.pulls

    def test_budget_must_exceed_initialization(self):
        with pytest.raises(ConfigurationError):
            run_episode([ArmModel.bernoulli(0.5)] * 3, policy(PolicyKind.ATP), DelayModel.none(), 6, seed=0)
        with pytest.raises(ConfigurationError):
            run_episode([], policy(PolicyKind.ATP), DelayModel.none(), 6, seed=0)

    def test_parameter_dependent_policy_needs_a(self):
        with pytest.raises(ConfigurationError):
            run_episode([ArmModel.bernoulli(0.5)], PolicyConfig(kind=PolicyKind.EVT, b=0.7), DelayModel.none(), 10, seed=0)

    def test_accounting(self):
        """At the end every issued pull is either observed or pending."""
        arms = random_arms(np.random.default_rng(1), 4)
        result = run_episode(arms, policy(PolicyKind.EVT_PF, b=0.5), DelayModel.fixed(7), 250, seed=1)
        assert sum(stats.observed_count + stats.pending_count for stats in result.final_stats) == 250
        assert sum(stats.pending_count for stats in result.final_stats) == 7
        assert [sum(1 for pulled in result.pulls if pulled == arm) + 2 for arm in range(4)] == [
            stats.observed_count + stats.pending_count for stats in result.final_stats
        ]

    @pytest.mark.parametrize("tau", [2, 4, 16])
    def test_max_pending_cap(self, tau):
        """With tau pulls in flight, tau - 1 are pending when the next one is chosen."""
        arms = random_arms(np.random.default_rng(2), 5)
        result = run_episode(arms, policy(PolicyKind.AP_EVT_PF, b=0.5, delta=1.0), DelayModel.max_pending(tau), 400, seed=2)
        assert result.max_total_pending == tau - 1
        assert result.max_pending_ratio > 0.0

    @pytest.mark.parametrize("d", [0, 1, 2, 5])
    def test_fixed_delay_bound(self, d):
        arms = random_arms(np.random.default_rng(3), 5)
        result = run_episode(arms, policy(PolicyKind.EVT_PF, b=0.5), DelayModel.fixed(d), 400, seed=3)
        assert result.max_total_pending == max(d - 1, 0)

    def test_zero_fixed_delay_is_no_delay(self):
        arms = random_arms(np.random.default_rng(4), 5)
        config = policy(PolicyKind.AP_EVT, b=0.5, n=300, num_arms=5, delta=1.0)
        undelayed = run_episode(arms, config, DelayModel.none(), 300, seed=4)
        assert run_episode(arms, config, DelayModel.fixed(0), 300, seed=4) == undelayed
        assert run_episode(arms, config, DelayModel.fixed(1), 300, seed=4) == undelayed

    @pytest.mark.parametrize("tau", [0, 1])
    def test_single_agent_is_no_delay(self, tau):
        arms = random_arms(np.random.default_rng(1), 5)
        config = policy(PolicyKind.AP_EVT_PF, b=0.5, delta=1.0)
        undelayed = run_episode(arms, config, DelayModel.none(), 300, seed=1)
        delayed = run_episode(arms, config, DelayModel.max_pending(tau), 300, seed=1)
        assert delayed == undelayed
        assert delayed.max_total_pending == 0

    def test_pending_cap_matches_fixed_delay_peak(self):
        arms = random_arms(np.random.default_rng(1), 5)
        config = policy(PolicyKind.AP_EVT_PF, b=0.5, delta=1.0)
        capped = run_episode(arms, config, DelayModel.max_pending(4), 300, seed=1)
        fixed = run_episode(arms, config, DelayModel.fixed(4), 300, seed=1)
        assert capped.max_total_pending == fixed.max_total_pending == 3

    @pytest.mark.parametrize("delay", [DelayModel.none(), DelayModel.fixed(6), DelayModel.max_pending(3)])
    def test_observed_rewards_are_a_prefix_of_the_arm_stream(self, delay):
        """Each arm observes the first rewards of its own stream, whatever the delay."""
        arms = [ArmModel.uniform_interval(0.4, 0.3), ArmModel.uniform_interval(0.6, 0.3), ArmModel.bernoulli(0.5)]
        result = run_episode(arms, PolicyConfig(kind=PolicyKind.EVT_PF, b=0.5), delay, 120, seed=9)
        for arm, (model, stats) in enumerate(zip(arms, result.final_stats)):
            stream = RewardStream(model, seed=9, arm=arm)
            prefix = [stream.draw() for _ in range(stats.observed_count)]
            assert stats.mean() == pytest.approx(np.mean(prefix), abs=1e-12)

    def test_threshold_set(self):
        arms = [ArmModel.point_mass(0.7), ArmModel.point_mass(0.69), ArmModel.bernoulli(0.8)]
        assert threshold_set(arms, 0.7) == frozenset({0, 2})


def _check_reductions(num_configs, seed):
    rng = np.random.default_rng(seed)
    for case in range(num_configs):
        num_arms = int(rng.integers(2, 8))
        n = int(rng.integers(2 * num_arms + 1, 400))
        b = float(rng.uniform(0.3, 0.7))
        arms = random_arms(rng, num_arms)
        a = float(rng.uniform(0.5, 50))
        delta = float(rng.random())
        evt = run_episode(arms, PolicyConfig(kind=PolicyKind.EVT, b=b, a=a), DelayModel.none(), n, seed=case)
        ap_evt = run_episode(arms, PolicyConfig(kind=PolicyKind.AP_EVT, b=b, a=a, delta=delta), DelayModel.none(), n, seed=case)
        assert ap_evt.pulls == evt.pulls
        for d in (0, 1, 5):
            delay = DelayModel.fixed(d)
            evt_pf = run_episode(arms, PolicyConfig(kind=PolicyKind.EVT_PF, b=b), delay, n, seed=case)
            ap_evt_pf = run_episode(arms, PolicyConfig(kind=PolicyKind.AP_EVT_PF, b=b, delta=0.0), delay, n, seed=case)
            assert ap_evt_pf.pulls == evt_pf.pulls


def test_reduction_identities():
    _check_reductions(num_configs=20, seed=100)


@pytest.mark.slow
def test_reduction_identities_many_configs():
    _check_reductions(num_configs=100, seed=101)
