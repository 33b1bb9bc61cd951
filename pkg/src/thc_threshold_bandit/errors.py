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
"""Exception types raised by the simulator.

Every class derives from a builtin exception, so callers may catch either the specific type or the builtin one.
"""


class DomainError(ValueError):
    """A value lies outside the mathematical domain of an operation (e.g. a reward outside [0, 1])."""


class PreconditionError(ValueError):
    """An operation was called before its precondition holds (e.g. an index with no observed reward)."""


class ConfigurationError(ValueError):
    """Invalid parameters, experiment files or unknown configuration keys."""


class DegenerateInstanceError(ValueError):
    """An arm mean sits exactly on the threshold, which makes every complexity constant infinite."""


class ProtocolError(RuntimeError):
    """Pull bookkeeping was violated (e.g. a reward arrived for an arm with no pending pull)."""
