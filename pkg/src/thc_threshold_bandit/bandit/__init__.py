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
"""Arm statistics, index policies, the episode engine and problem-complexity helpers."""

from .complexity import ProblemSummary, make_tbp_instance, summarize
from .env import ArmModel, DelayModel, EpisodeResult, run_episode
from .policies import Classification, PolicyConfig, PolicyKind, classify, select_arm
from .stats import ArmStats

__all__ = [
    "ArmModel",
    "ArmStats",
    "Classification",
    "DelayModel",
    "EpisodeResult",
    "PolicyConfig",
    "PolicyKind",
    "ProblemSummary",
    "classify",
    "make_tbp_instance",
    "run_episode",
    "select_arm",
    "summarize",
]
