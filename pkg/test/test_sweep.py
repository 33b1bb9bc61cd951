import dataclasses

import pytest

from thc_threshold_bandit.bandit.env import ArmModel, DelayModel, run_episode
from thc_threshold_bandit.bandit.policies import PolicyKind
from thc_threshold_bandit.errors import ConfigurationError
from thc_threshold_bandit.harness.config import ARule, ExperimentConfig, InstanceRecipe, InstanceSpec, PolicySpec
from thc_threshold_bandit.harness.sweep import CellFailure, SweepRow, run_replication, run_sweep
from thc_threshold_bandit.utils.seeding import SeedPurpose, derive_seed, make_rng


def explicit_config(arms, policies, budgets, delays=(DelayModel.none(),), replications=1, b=0.5, root_seed=0):
    return ExperimentConfig(
        instance=InstanceSpec(arms=tuple(arms)),
        b=b,
        policies=tuple(policies),
        budgets=tuple(budgets),
        delays=tuple(delays),
        replications=replications,
        root_seed=root_seed,
    )


@pytest.fixture
def random_config():
    return ExperimentConfig(
        instance=InstanceSpec(recipe=InstanceRecipe(num_arms=4, mean_range=(0.3, 0.7), half_width_range=(0.1, 0.2))),
        b=0.5,
        policies=(PolicySpec(kind=PolicyKind.EVT_PF), PolicySpec(kind=PolicyKind.AP_EVT, delta=0.5)),
        budgets=(40, 80),
        delays=(DelayModel.none(), DelayModel.max_pending(2)),
        replications=6,
        root_seed=3,
    )


def test_single_cell_sweep():
    config = explicit_config([ArmModel.bernoulli(0.6), ArmModel.bernoulli(0.4)], [PolicySpec(kind=PolicyKind.ATP)], [20])
    result = run_sweep(config)
    assert len(result.rows) == 1
    assert result.rows[0].success_rate in (0.0, 1.0)
    assert result.rows[0].reps == 1
    assert not result.failures


@pytest.mark.parametrize("kind", list(PolicyKind))
def test_deterministic_arms_are_always_classified(kind):
    arms = [ArmModel.point_mass(0.95), ArmModel.point_mass(0.05), ArmModel.point_mass(0.9)]
    config = explicit_config(arms, [PolicySpec(kind=kind)], [7], delays=[DelayModel.none(), DelayModel.fixed(2)], replications=5)
    result = run_sweep(config)
    assert [row.success_rate for row in result.rows] == [1.0, 1.0]


def test_small_budget_is_a_cell_failure():
    arms = [ArmModel.point_mass(0.95), ArmModel.point_mass(0.05)]
    config = explicit_config(arms, [PolicySpec(kind=PolicyKind.ATP)], [4, 5], replications=2)
    result = run_sweep(config)
    assert [row.n for row in result.rows] == [5]
    assert len(result.failures) == 1
    failure = result.failures[0]
    assert (failure.policy, failure.n, failure.delay) == ("ATP", 4, "none")
    assert "2K=4" in failure.reason


def test_degenerate_theory_instance_is_a_cell_failure():
    arms = [ArmModel.bernoulli(0.5), ArmModel.bernoulli(0.8)]
    config = explicit_config(arms, [PolicySpec(kind=PolicyKind.EVT, a_rule=ARule.THEORY), PolicySpec(kind=PolicyKind.ATP)], [20])
    result = run_sweep(config)
    assert [failure.policy for failure in result.failures] == ["EVT"]
    assert [row.policy for row in result.rows] == ["ATP"]


def test_rows_are_sorted(random_config):
    rows = run_sweep(random_config).rows
    keys = [(row.policy, row.n, row.delay) for row in rows]
    assert keys == sorted(keys)
    assert len(rows) == 2 * 2 * 2
    for row in rows:
        assert 0.0 <= row.success_rate <= 1.0
        assert row.reps == 6
        if row.delay == "none":
            assert row.mean_max_pending == 0.0
        else:
            assert row.mean_max_pending == 1.0
            assert row.mean_pending_ratio > 0.0


def test_replication_uses_the_shared_episode_seed(random_config):
    """Every cell of a replication runs on the same instance with the same episode seed."""
    rep = 4
    arms = random_config.instance.draw(make_rng(random_config.root_seed, SeedPurpose.INSTANCE, rep))
    seed = derive_seed(random_config.root_seed, SeedPurpose.EPISODE, rep)
    outcomes = run_replication(random_config, rep)
    for policy in random_config.policies:
        for n in random_config.budgets:
            for delay in random_config.delays:
                expected = run_episode(arms, policy.resolve(random_config.b, n, arms), delay, n, seed)
                outcome = outcomes[(policy.name, n, delay.descriptor)]
                assert outcome.mistake == expected.mistake
                assert outcome.max_total_pending == expected.max_total_pending


def test_adding_a_policy_leaves_other_rows_unchanged(random_config):
    base = run_sweep(random_config).rows
    extended = dataclasses.replace(random_config, policies=random_config.policies + (PolicySpec(kind=PolicyKind.ATP),))
    rows = [row for row in run_sweep(extended).rows if row.policy != "ATP"]
    assert rows == list(base)


def test_seed_changes_results(random_config):
    other = dataclasses.replace(random_config, root_seed=4, replications=30)
    base = dataclasses.replace(random_config, replications=30)
    assert run_sweep(other).rows != run_sweep(base).rows


def test_fixed_instance(random_config):
    config = dataclasses.replace(random_config, fixed_instance=True)
    arms = config.instance.draw(make_rng(config.root_seed, SeedPurpose.INSTANCE, 0))
    seed = derive_seed(config.root_seed, SeedPurpose.EPISODE, 5)
    policy, n, delay = config.policies[0], 80, DelayModel.max_pending(2)
    expected = run_episode(arms, policy.resolve(config.b, n, arms), delay, n, seed)
    assert run_replication(config, 5)[(policy.name, n, delay.descriptor)].mistake == expected.mistake


def test_jobs_do_not_change_results(random_config):
    assert run_sweep(random_config, jobs=2) == run_sweep(random_config, jobs=1)


def test_invalid_jobs(random_config):
    with pytest.raises(ConfigurationError):
        run_sweep(random_config, jobs=0)


def test_result_types(random_config):
    result = run_sweep(dataclasses.replace(random_config, budgets=(8, 40)))
    assert all(isinstance(row, SweepRow) for row in result.rows)
    assert all(isinstance(failure, CellFailure) for failure in result.failures)
    assert {failure.n for failure in result.failures} == {8}
