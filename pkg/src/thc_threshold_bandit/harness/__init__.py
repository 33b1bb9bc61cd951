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
"""Experiment harness: config files, replicated sweeps, metrics, reports and the command line."""

from .config import ExperimentConfig, InstanceRecipe, PolicySpec, load_experiment_config
from .metrics import rounds_to_accuracy, speedup, speedup_table
from .report import emit_csv, render_markdown
from .sweep import SweepResult, SweepRow, run_sweep

__all__ = [
    "ExperimentConfig",
    "InstanceRecipe",
    "PolicySpec",
    "SweepResult",
    "SweepRow",
    "emit_csv",
    "load_experiment_config",
    "render_markdown",
    "rounds_to_accuracy",
    "run_sweep",
    "speedup",
    "speedup_table",
]
