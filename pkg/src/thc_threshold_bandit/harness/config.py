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
"""Experiment files: parsing and validation into frozen dataclasses.

An experiment file is a YAML mapping whose keys are the :class:`ExperimentConfig` field names::

    instance:
      recipe: {num_arms: 100, mean_range: [0.6, 0.8], half_width_range: [0.15, 0.25]}
    b: 0.7
    policies: [{kind: ATP}, {kind: EVT}, {kind: EVT_PF}]
    budgets: [200, 400, 800]
    delays: [none, {kind: max_pending, tau: 4}]
    replications: 100
    root_seed: 0

Unknown keys at any level are rejected.
"""

import math
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from thc_threshold_bandit.bandit.complexity import summarize, theoretical_a
from thc_threshold_bandit.bandit.env import ArmKind, ArmModel, DelayKind, DelayModel
from thc_threshold_bandit.bandit.policies import PolicyConfig, PolicyKind
from thc_threshold_bandit.errors import ConfigurationError, DomainError
from thc_threshold_bandit.observability import LogLevel, logger
from thc_threshold_bandit.utils.yaml import apply_overrides, load_yaml

_DELAY_DESCRIPTOR = re.compile(r"^(none|fixed|max_pending)(?:\((\d+)\))?$")


def _fail(message: str) -> ConfigurationError:
    logger.highlight(level=LogLevel.ERROR, message=f"[Config] {message}")
    return ConfigurationError(message)


def _first_duplicate(values: Sequence[Any]) -> Any | None:
    seen: set[Any] = set()
    for value in values:
        if value in seen:
            return value
        seen.add(value)
    return None


def _check_keys(mapping: Any, allowed: Iterable[str], where: str, required: Iterable[str] = ()) -> dict[str, Any]:
    if not isinstance(mapping, dict):
        raise _fail(f"{where} must be a mapping, got {type(mapping).__name__}")
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise _fail(f"Unknown key {where}.{unknown[0]}" if where else f"Unknown key {unknown[0]}")
    for key in required:
        if key not in mapping:
            raise _fail(f"Missing key {where}.{key}" if where else f"Missing key {key}")
    return mapping


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise _fail(f"{where} must be a finite number, got {value!r}")
    return float(value)


def _integer(value: Any, where: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise _fail(f"{where} must be an integer >= {minimum}, got {value!r}")
    return value


def _number_range(value: Any, where: str) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise _fail(f"{where} must be a [low, high] pair, got {value!r}")
    low, high = _number(value[0], f"{where}[0]"), _number(value[1], f"{where}[1]")
    if low > high:
        raise _fail(f"{where} has low {low} above high {high}")
    return low, high


@dataclass(frozen=True)
class InstanceRecipe:
    """Random instance: means drawn from ``U(mean_range)``, half-widths from ``U(half_width_range)``.

    Attributes:
        num_arms (int): Number of arms K.
        mean_range (tuple[float, float]): Range of the arm means.
        half_width_range (tuple[float, float]): Range of the half-widths of uniform arms.
        distribution (ArmKind): Family of the arms; point masses ignore the half-widths.
        clip_half_width (bool): Truncate each half-width to ``min(r, mu, 1 - mu)`` so the support stays in [0, 1].
            When unset, ranges that can leave [0, 1] are rejected.
    """

    num_arms: int
    mean_range: tuple[float, float]
    half_width_range: tuple[float, float] = (0.0, 0.0)
    distribution: ArmKind = ArmKind.UNIFORM_INTERVAL
    clip_half_width: bool = True

    def __post_init__(self) -> None:
        """Check that the ranges describe arms supported in [0, 1]."""
        low, high = self.mean_range
        r_low, r_high = self.half_width_range
        if self.num_arms < 1:
            raise _fail(f"Recipe needs at least one arm, got {self.num_arms}")
        if not 0.0 <= low <= high <= 1.0:
            raise _fail(f"Mean range {self.mean_range} must lie in [0, 1]")
        if not 0.0 <= r_low <= r_high:
            raise _fail(f"Half-width range {self.half_width_range} must be non-negative")
        if self.distribution is not ArmKind.UNIFORM_INTERVAL or r_high == 0.0:
            return
        if low - r_high >= 0.0 and high + r_high <= 1.0:
            return
        if not self.clip_half_width:
            raise _fail(f"Means in {self.mean_range} with half-widths up to {r_high} can leave [0, 1]")
        logger.highlight(
            level=LogLevel.WARNING,
            message=f"[Config] Half-widths up to {r_high} are clipped to min(r, mu, 1 - mu) for means in {self.mean_range}.",
        )

    def draw(self, rng: np.random.Generator) -> list[ArmModel]:
        """Draw the arms of one instance; means first, then half-widths."""
        means = rng.uniform(self.mean_range[0], self.mean_range[1], size=self.num_arms)
        if self.distribution is ArmKind.BERNOULLI:
            return [ArmModel.bernoulli(float(mu)) for mu in means]
        if self.distribution is ArmKind.POINT_MASS:
            return [ArmModel.point_mass(float(mu)) for mu in means]
        widths = rng.uniform(self.half_width_range[0], self.half_width_range[1], size=self.num_arms)
        if self.clip_half_width:
            widths = np.minimum(widths, np.minimum(means, 1.0 - means))
        return [ArmModel.uniform_interval(float(mu), float(r)) for mu, r in zip(means, widths)]


@dataclass(frozen=True)
class InstanceSpec:
    """Either an explicit list of arms or a random recipe.

    Attributes:
        arms (tuple[ArmModel, ...]): Explicit arms; empty when a recipe is used.
        recipe (InstanceRecipe | None): Random recipe; None when arms are explicit.
    """

    arms: tuple[ArmModel, ...] = ()
    recipe: InstanceRecipe | None = None

    @property
    def num_arms(self) -> int:
        """Number of arms K."""
        return self.recipe.num_arms if self.recipe is not None else len(self.arms)

    def draw(self, rng: np.random.Generator) -> list[ArmModel]:
        """The explicit arms, or a fresh draw from the recipe."""
        if self.recipe is not None:
            return self.recipe.draw(rng)
        return list(self.arms)


class ARule(str, Enum):
    """How the exploration parameter is chosen per budget when not given explicitly."""

    N_OVER_K = "n_over_k"
    THEORY = "theory"


@dataclass(frozen=True)
class PolicySpec:
    """A policy of a sweep; resolved per budget and instance into a :class:`PolicyConfig`.

    Attributes:
        kind (PolicyKind): The index rule.
        a (float | None): Fixed exploration parameter; overrides ``a_rule``.
        delta (float): Weight of pending pulls.
        a_rule (ARule): ``n_over_k`` sets ``a = n / K``; ``theory`` uses the true instance's complexity.
        eta (float): Pending-over-observed ratio assumed by the ``theory`` rule.
        tau (int): Pending cap assumed by the ``theory`` rule.
        label (str | None): Name in reports; derived from the kind when unset.
    """

    kind: PolicyKind
    a: float | None = None
    delta: float = 0.0
    a_rule: ARule = ARule.N_OVER_K
    eta: float = 0.0
    tau: int = 0
    label: str | None = None

    @property
    def name(self) -> str:
        """Report name, e.g. ``AP_EVT[delta=0.5]``."""
        if self.label:
            return self.label
        if self.kind.uses_pending and self.delta != 0.0:
            return f"{self.kind.value}[delta={self.delta:g}]"
        return self.kind.value

    def resolve(self, b: float, n: int, arms: Sequence[ArmModel]) -> PolicyConfig:
        """Build the policy for one budget and instance.

        Args:
            b (float): The threshold.
            n (int): The budget.
            arms (Sequence[ArmModel]): The instance, used by the ``theory`` rule.

        Returns:
            PolicyConfig: The resolved policy.
        """
        config = PolicyConfig(kind=self.kind, b=b, delta=self.delta)
        if not self.kind.is_parameter_dependent:
            return config
        if self.a is not None:
            return config.with_a(self.a)
        if self.a_rule is ARule.N_OVER_K:
            return config.with_a(n / len(arms))
        summary = summarize(arms, b)
        return config.with_a(theoretical_a(summary, self.kind, n, tau=self.tau, delta=self.delta, eta=self.eta))


@dataclass(frozen=True)
class ExperimentConfig:  # pylint: disable=too-many-instance-attributes
    """A validated experiment.

    Attributes:
        instance (InstanceSpec): Arms or random recipe.
        b (float): The threshold.
        policies (tuple[PolicySpec, ...]): Policies to compare; names are unique.
        budgets (tuple[int, ...]): Budgets ``n``.
        delays (tuple[DelayModel, ...]): Delay models.
        replications (int): Episodes per cell.
        root_seed (int): Root of every random stream.
        target_accuracy (float): Success rate the speedup study aims for.
        fixed_instance (bool): Reuse the replication-0 instance in every replication instead of redrawing.
    """

    instance: InstanceSpec
    b: float
    policies: tuple[PolicySpec, ...]
    budgets: tuple[int, ...]
    delays: tuple[DelayModel, ...] = field(default_factory=lambda: (DelayModel.none(),))
    replications: int = 1
    root_seed: int = 0
    target_accuracy: float = 0.95
    fixed_instance: bool = False

    def __post_init__(self) -> None:
        """Validate cross-field constraints."""
        if not self.policies:
            raise _fail("At least one policy is required")
        duplicate_name = _first_duplicate([policy.name for policy in self.policies])
        if duplicate_name is not None:
            raise _fail(f"Duplicate policy name {duplicate_name}; set a label")
        if not self.budgets or not self.delays:
            raise _fail("At least one budget and one delay model are required")
        duplicate_budget = _first_duplicate(self.budgets)
        if duplicate_budget is not None:
            raise _fail(f"Duplicate budget {duplicate_budget}")
        duplicate_delay = _first_duplicate([delay.descriptor for delay in self.delays])
        if duplicate_delay is not None:
            raise _fail(f"Duplicate delay model {duplicate_delay}")
        if self.replications < 1:
            raise _fail(f"replications must be at least 1, got {self.replications}")
        if not 0.0 < self.target_accuracy <= 1.0:
            raise _fail(f"target_accuracy must lie in (0, 1], got {self.target_accuracy}")
        too_small = [n for n in self.budgets if n <= 2 * self.instance.num_arms]
        if too_small:
            logger.highlight(
                level=LogLevel.WARNING,
                message=f"[Config] Budgets {too_small} do not exceed 2K={2 * self.instance.num_arms}; their cells will fail.",
            )


def parse_arm(raw: Any, where: str) -> ArmModel:
    """Parse ``{kind: bernoulli, p}``, ``{kind: uniform_interval, mu, r}`` or ``{kind: point_mass, v}``."""
    mapping = _check_keys(raw, ("kind", "p", "mu", "r", "v"), where, required=("kind",))
    try:
        kind = ArmKind(mapping["kind"])
    except ValueError as exception:
        raise _fail(f"{where}.kind must be one of {[k.value for k in ArmKind]}, got {mapping['kind']!r}") from exception
    params = {ArmKind.BERNOULLI: ("p",), ArmKind.UNIFORM_INTERVAL: ("mu", "r"), ArmKind.POINT_MASS: ("v",)}[kind]
    _check_keys(mapping, ("kind", *params), where, required=params)
    values = [_number(mapping[name], f"{where}.{name}") for name in params]
    try:
        if kind is ArmKind.BERNOULLI:
            return ArmModel.bernoulli(values[0])
        if kind is ArmKind.UNIFORM_INTERVAL:
            return ArmModel.uniform_interval(values[0], values[1])
        return ArmModel.point_mass(values[0])
    except DomainError as exception:
        raise _fail(f"{where}: {exception}") from exception


def parse_instance(raw: Any) -> InstanceSpec:
    """Parse the ``instance`` section: exactly one of ``arms`` or ``recipe``."""
    mapping = _check_keys(raw, ("arms", "recipe"), "instance")
    if ("arms" in mapping) == ("recipe" in mapping):
        raise _fail("instance needs exactly one of arms or recipe")
    if "arms" in mapping:
        if not isinstance(mapping["arms"], list) or not mapping["arms"]:
            raise _fail("instance.arms must be a non-empty list")
        return InstanceSpec(arms=tuple(parse_arm(arm, f"instance.arms[{i}]") for i, arm in enumerate(mapping["arms"])))

    where = "instance.recipe"
    recipe = _check_keys(
        mapping["recipe"],
        ("num_arms", "mean_range", "half_width_range", "distribution", "clip_half_width"),
        where,
        required=("num_arms", "mean_range"),
    )
    try:
        distribution = ArmKind(recipe.get("distribution", ArmKind.UNIFORM_INTERVAL.value))
    except ValueError as exception:
        raise _fail(f"{where}.distribution must be one of {[k.value for k in ArmKind]}") from exception
    clip = recipe.get("clip_half_width", True)
    if not isinstance(clip, bool):
        raise _fail(f"{where}.clip_half_width must be a boolean, got {clip!r}")
    return InstanceSpec(
        recipe=InstanceRecipe(
            num_arms=_integer(recipe["num_arms"], f"{where}.num_arms", minimum=1),
            mean_range=_number_range(recipe["mean_range"], f"{where}.mean_range"),
            half_width_range=_number_range(recipe.get("half_width_range", [0.0, 0.0]), f"{where}.half_width_range"),
            distribution=distribution,
            clip_half_width=clip,
        )
    )


def parse_policy(raw: Any, where: str) -> PolicySpec:
    """Parse one policy entry, either a kind name or a mapping."""
    if isinstance(raw, str):
        raw = {"kind": raw}
    mapping = _check_keys(raw, ("kind", "a", "delta", "a_rule", "eta", "tau", "label"), where, required=("kind",))
    try:
        kind = PolicyKind(mapping["kind"])
        a_rule = ARule(mapping.get("a_rule", ARule.N_OVER_K.value))
    except ValueError as exception:
        raise _fail(f"{where}: {exception}") from exception
    a = _number(mapping["a"], f"{where}.a") if mapping.get("a") is not None else None
    if a is not None and not a > 0.0:
        raise _fail(f"{where}.a must be positive, got {a}")
    delta = _number(mapping.get("delta", 0.0), f"{where}.delta")
    if not 0.0 <= delta <= 1.0:
        raise _fail(f"{where}.delta must lie in [0, 1], got {delta}")
    label = mapping.get("label")
    if label is not None and not isinstance(label, str):
        raise _fail(f"{where}.label must be a string, got {label!r}")
    return PolicySpec(
        kind=kind,
        a=a,
        delta=delta,
        a_rule=a_rule,
        eta=_number(mapping.get("eta", 0.0), f"{where}.eta"),
        tau=_integer(mapping.get("tau", 0), f"{where}.tau"),
        label=label,
    )


def parse_delay(raw: Any, where: str) -> DelayModel:
    """Parse a delay: ``none``, ``fixed(3)``, ``max_pending(4)`` or ``{kind: fixed, d: 3}``."""
    if isinstance(raw, str):
        match_ = _DELAY_DESCRIPTOR.match(raw.strip())
        if not match_ or (match_.group(1) == "none") != (match_.group(2) is None):
            raise _fail(f"{where} must look like none, fixed(d) or max_pending(tau), got {raw!r}")
        raw = {"kind": match_.group(1)}
        if match_.group(2) is not None:
            raw["d" if match_.group(1) == "fixed" else "tau"] = int(match_.group(2))
    mapping = _check_keys(raw, ("kind", "d", "tau"), where, required=("kind",))
    try:
        kind_ = DelayKind(mapping["kind"])
    except ValueError as exception:
        raise _fail(f"{where}.kind must be one of {[k.value for k in DelayKind]}, got {mapping['kind']!r}") from exception
    if kind_ is DelayKind.FIXED:
        _check_keys(mapping, ("kind", "d"), where, required=("d",))
        return DelayModel.fixed(_integer(mapping["d"], f"{where}.d"))
    if kind_ is DelayKind.MAX_PENDING:
        _check_keys(mapping, ("kind", "tau"), where, required=("tau",))
        return DelayModel.max_pending(_integer(mapping["tau"], f"{where}.tau"))
    _check_keys(mapping, ("kind",), where)
    return DelayModel.none()


def _list(raw: dict[str, Any], key: str, default: list[Any] | None = None) -> list[Any]:
    value = raw.get(key, default)
    if not isinstance(value, list) or not value:
        raise _fail(f"{key} must be a non-empty list")
    return value


def parse_experiment_config(raw: dict[str, Any]) -> ExperimentConfig:
    """Validate a raw experiment mapping.

    Args:
        raw (dict[str, Any]): The parsed YAML document, overrides applied.

    Returns:
        ExperimentConfig: The validated experiment.

    Raises:
        ConfigurationError: If a key is unknown or missing, or a value is invalid.
    """
    fields = (
        "instance",
        "b",
        "policies",
        "budgets",
        "delays",
        "replications",
        "root_seed",
        "target_accuracy",
        "fixed_instance",
    )
    _check_keys(raw, fields, "", required=("instance", "b", "policies", "budgets"))
    fixed_instance = raw.get("fixed_instance", False)
    if not isinstance(fixed_instance, bool):
        raise _fail(f"fixed_instance must be a boolean, got {fixed_instance!r}")
    return ExperimentConfig(
        instance=parse_instance(raw["instance"]),
        b=_number(raw["b"], "b"),
        policies=tuple(parse_policy(policy, f"policies[{i}]") for i, policy in enumerate(_list(raw, "policies"))),
        budgets=tuple(_integer(n, f"budgets[{i}]", minimum=1) for i, n in enumerate(_list(raw, "budgets"))),
        delays=tuple(parse_delay(delay, f"delays[{i}]") for i, delay in enumerate(_list(raw, "delays", ["none"]))),
        replications=_integer(raw.get("replications", 1), "replications", minimum=1),
        root_seed=_integer(raw.get("root_seed", 0), "root_seed"),
        target_accuracy=_number(raw.get("target_accuracy", 0.95), "target_accuracy"),
        fixed_instance=fixed_instance,
    )


def load_experiment_config(path: str | Path, overrides: Iterable[str] = (), seed: int | None = None) -> ExperimentConfig:
    """Read, override and validate an experiment file.

    Args:
        path (str | Path): The YAML file.
        overrides (Iterable[str]): ``key.path=value`` overrides applied before validation.
        seed (int | None): Replaces ``root_seed`` when given.

    Returns:
        ExperimentConfig: The validated experiment.
    """
    raw = apply_overrides(load_yaml(path), overrides)
    if seed is not None:
        raw["root_seed"] = seed
    config = parse_experiment_config(raw)
    logger.info(
        "[Config] Loaded %s: K=%d, %d policies, %d budgets, %d delays, %d replications",
        path,
        config.instance.num_arms,
        len(config.policies),
        len(config.budgets),
        len(config.delays),
        config.replications,
    )
    return config
