import math

import pytest

from thc_threshold_bandit.bandit.policies import PolicyKind
from thc_threshold_bandit.errors import ConfigurationError, DomainError
from thc_threshold_bandit.harness.config import PolicySpec
from thc_threshold_bandit.harness.lowerbound import run_lowerbound


def test_report_covers_every_instance():
    report = run_lowerbound(num_arms=3, gap=0.05, n=60, replications=10, root_seed=1)
    assert [rate.instance for rate in report.per_instance] == [0, 1, 2, 3]
    assert all(0.0 <= rate.mistake_rate <= 1.0 for rate in report.per_instance)
    assert report.policy == "EVT"
    assert report.empirical_max == max(rate.mistake_rate for rate in report.per_instance)


def test_bound_matches_formula():
    report = run_lowerbound(num_arms=5, gap=0.1, n=500, replications=2)
    # Bernoulli(0.6) around 1/2: (0.24 + 0.1) / 0.01 per arm
    assert report.h_evt == pytest.approx(170.0)
    assert report.exponent == pytest.approx(-10 * 500 / 170.0 - 16 * math.log(5 * 500 * 5))
    assert report.theoretical == pytest.approx(math.exp(report.exponent))
    assert report.theoretical < 1e-70


def test_is_deterministic():
    policy = PolicySpec(kind=PolicyKind.AP_EVT_PF, delta=0.5)
    first = run_lowerbound(num_arms=2, gap=0.1, n=40, replications=5, policy=policy, root_seed=3)
    assert run_lowerbound(num_arms=2, gap=0.1, n=40, replications=5, policy=policy, root_seed=3) == first
    assert first.policy == "AP_EVT_PF[delta=0.5]"


def test_invalid_arguments():
    with pytest.raises(ConfigurationError):
        run_lowerbound(num_arms=2, gap=0.1, n=40, replications=0)
    with pytest.raises(ConfigurationError):
        run_lowerbound(num_arms=2, gap=0.1, n=4, replications=1)
    with pytest.raises(DomainError):
        run_lowerbound(num_arms=2, gap=0.3, n=40, replications=1)
