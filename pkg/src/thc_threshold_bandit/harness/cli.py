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
"""Command line interface: ``sweep``, ``speedup``, ``complexity`` and ``lowerbound``.

Exit codes: 0 on success, 1 when ``--strict`` finds failed cells or the lower-bound check fails, 2 on invalid input.
"""

import argparse
import sys
from collections.abc import Sequence

from thc_threshold_bandit.bandit.complexity import expected_summary, summarize
from thc_threshold_bandit.bandit.policies import PolicyKind
from thc_threshold_bandit.harness.config import ExperimentConfig, PolicySpec, load_experiment_config
from thc_threshold_bandit.harness.lowerbound import run_lowerbound
from thc_threshold_bandit.harness.metrics import speedup_table
from thc_threshold_bandit.harness.report import emit_csv, render_markdown
from thc_threshold_bandit.harness.sweep import SweepResult, run_sweep
from thc_threshold_bandit.observability import LogLevel, configure_logger, logger


def _build_parser() -> argparse.ArgumentParser:
    logging_options = argparse.ArgumentParser(add_help=False)
    logging_options.add_argument("--log-level", default="INFO", help="Logging level, e.g. DEBUG or WARNING.")
    logging_options.add_argument("--log-file", default=None, help="Also append log records to this file.")

    experiment_options = argparse.ArgumentParser(add_help=False)
    experiment_options.add_argument("--config", required=True, help="Experiment YAML file.")
    experiment_options.add_argument("--seed", type=int, default=None, help="Override root_seed.")
    experiment_options.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY.PATH=VALUE",
        help="Override a config value before validation, e.g. policies[1].delta=0.5. Repeatable.",
    )

    sweep_options = argparse.ArgumentParser(add_help=False)
    sweep_options.add_argument("--out", default=None, help="Write the sweep rows to this CSV file.")
    sweep_options.add_argument("--jobs", type=int, default=1, help="Worker processes for replications.")
    sweep_options.add_argument("--strict", action="store_true", help="Exit nonzero if any cell fails.")

    parser = argparse.ArgumentParser(prog="thc-threshold-bandit", description="Thresholding bandit simulator.")
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser(
        "sweep",
        parents=[logging_options, experiment_options, sweep_options],
        help="Run a replicated sweep and report success rates.",
    )
    subparsers.add_parser(
        "speedup",
        parents=[logging_options, experiment_options, sweep_options],
        help="Run a sweep and report the speedup of every max_pending delay.",
    )
    complexity = subparsers.add_parser(
        "complexity",
        parents=[logging_options, experiment_options],
        help="Print the complexity constants of the config's instance.",
    )
    complexity.add_argument("--draws", type=int, default=10_000, help="Instances drawn from a random recipe.")

    lowerbound = subparsers.add_parser(
        "lowerbound",
        parents=[logging_options],
        help="Stress a policy on the Bernoulli hard instances.",
    )
    lowerbound.add_argument("--num-arms", type=int, default=5, help="Number of arms K.")
    lowerbound.add_argument("--gap", type=float, default=0.1, help="Gap of every arm, in (0, 0.25].")
    lowerbound.add_argument("--n", type=int, default=500, help="Budget.")
    lowerbound.add_argument("--replications", type=int, default=100, help="Episodes per instance.")
    lowerbound.add_argument("--policy", choices=[kind.value for kind in PolicyKind], default=PolicyKind.EVT.value)
    lowerbound.add_argument("--seed", type=int, default=0, help="Root seed.")
    return parser


def _load(args: argparse.Namespace) -> ExperimentConfig:
    return load_experiment_config(args.config, overrides=args.overrides, seed=args.seed)


def _sweep(args: argparse.Namespace, config: ExperimentConfig) -> SweepResult:
    result = run_sweep(config, jobs=args.jobs)
    if args.out:
        emit_csv(result.rows, args.out)
    if result.failures:
        print(render_markdown(result.failures))
    return result


def _strict_exit(args: argparse.Namespace, result: SweepResult) -> int:
    if args.strict and result.failures:
        first = result.failures[0]
        print(f"error: cell {first.policy} n={first.n} delay={first.delay} failed: {first.reason}", file=sys.stderr)
        return 1
    return 0


def _run_sweep(args: argparse.Namespace) -> int:
    result = _sweep(args, _load(args))
    print(render_markdown(result.rows))
    return _strict_exit(args, result)


def _run_speedup(args: argparse.Namespace) -> int:
    config = _load(args)
    result = _sweep(args, config)
    table = [
        row
        for policy in config.policies
        for row in speedup_table(result.rows, policy.name, config.delays, config.target_accuracy)
    ]
    print(render_markdown(table))
    return _strict_exit(args, result)


def _run_complexity(args: argparse.Namespace) -> int:
    config = _load(args)
    if config.instance.recipe is None:
        summary = summarize(config.instance.arms, config.b)
        print(f"h_atp={summary.h_atp:.6g} h_evt={summary.h_evt:.6g}")
        return 0
    expected = expected_summary(config.instance.recipe, config.b, args.draws, config.root_seed)
    print(f"E[h_atp]={expected.h_atp:.6g} E[h_evt]={expected.h_evt:.6g} draws={expected.draws} skipped={expected.skipped}")
    return 0


def _run_lowerbound(args: argparse.Namespace) -> int:
    report = run_lowerbound(
        num_arms=args.num_arms,
        gap=args.gap,
        n=args.n,
        replications=args.replications,
        policy=PolicySpec(kind=PolicyKind(args.policy)),
        root_seed=args.seed,
    )
    print(render_markdown(report.per_instance))
    print(f"empirical_max={report.empirical_max:.6g}")
    print(f"theoretical=exp({report.exponent:.6g})={report.theoretical:.6g}")
    return 0 if report.holds else 1


_COMMANDS = {
    "sweep": _run_sweep,
    "speedup": _run_speedup,
    "complexity": _run_complexity,
    "lowerbound": _run_lowerbound,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line interface.

    Args:
        argv (Sequence[str] | None): Arguments without the program name; ``sys.argv[1:]`` when None.

    Returns:
        int: The exit code.
    """
    args = _build_parser().parse_args(argv)
    try:
        configure_logger(args.log_level, args.log_file)
        return _COMMANDS[args.command](args)
    except (OSError, ValueError) as exception:
        logger.highlight(level=LogLevel.ERROR, message=f"[CLI] {exception}")
        print(f"error: {exception}", file=sys.stderr)
        return 2
