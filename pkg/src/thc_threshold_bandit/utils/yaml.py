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
"""YAML loading and ``key.path=value`` overrides for experiment files."""

import io
import re
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from thc_threshold_bandit.errors import ConfigurationError
from thc_threshold_bandit.observability import LogLevel, logger

# one path component: 'quoted', "quoted" or plain key, followed by any number of [index]
_COMPONENT = re.compile(r"""(?:'([^']*)'|"([^"]*)"|([A-Za-z0-9_\-]+))((?:\[\d+\])*)""")


def load_yaml(path: str | Path) -> dict[str, Any]:
    """Read a YAML document whose top level is a mapping.

    Args:
        path (str | Path): Path of the YAML file.

    Returns:
        dict[str, Any]: The parsed mapping.

    Raises:
        FileNotFoundError: If the file does not exist.
        ConfigurationError: If the file is not valid YAML or its top level is not a mapping.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Config file not found: {path}")
    try:
        data = YAML(typ="safe").load(path)
    except YAMLError as exception:
        logger.highlight(level=LogLevel.ERROR, message=f"[Config] Failed to parse {path}: {exception}")
        raise ConfigurationError(f"Failed to parse {path}: {exception}") from exception
    if not isinstance(data, dict):
        raise ConfigurationError(f"Top level of {path} must be a mapping, got {type(data).__name__}")
    return data


def parse_key_path(key_path: str) -> list[str | int]:
    """Split a key path such as ``policies[1].delta`` into keys and list indices.

    Args:
        key_path (str): Dotted key path; components may be quoted and carry ``[i]`` suffixes.

    Returns:
        list[str | int]: Keys and indices in traversal order.

    Raises:
        ConfigurationError: If the path cannot be parsed.
    """
    tokens: list[str | int] = []
    for part_start, part in _split_dots(key_path):
        match_ = _COMPONENT.fullmatch(part)
        if not match_:
            logger.highlight(level=LogLevel.ERROR, message=f"[Config] Invalid key path at position {part_start}: {key_path}")
            raise ConfigurationError(f"Invalid key path at position {part_start}: {key_path}")
        key = next(group for group in match_.groups()[:3] if group is not None)
        tokens.append(key)
        tokens.extend(int(index) for index in re.findall(r"\[(\d+)\]", match_.group(4)))
    if not tokens:
        raise ConfigurationError(f"Empty key path: {key_path!r}")
    return tokens


def _split_dots(key_path: str) -> Iterable[tuple[int, str]]:
    """Split on dots that are outside quotes, skipping empty components."""
    start, quote = 0, ""
    for pos, char in enumerate(key_path + "."):
        if quote:
            quote = "" if char == quote else quote
        elif char in "'\"":
            quote = char
        elif char == ".":
            if pos > start:
                yield start, key_path[start:pos]
            start = pos + 1


def set_value_to_dict(dictionary: dict[str, Any], key_path: str, value: Any) -> None:
    """Set a value inside nested mappings and lists, creating intermediate containers.

    Args:
        dictionary (dict[str, Any]): The mapping to modify in place.
        key_path (str): Key path of the value.
        value (Any): The value to set.

    Raises:
        ConfigurationError: If the path crosses a container of the wrong type.
    """
    tokens = parse_key_path(key_path)
    node: Any = dictionary
    for token, next_token in zip(tokens[:-1], tokens[1:]):
        empty: Any = [] if isinstance(next_token, int) else {}
        node = _child(node, token, empty, key_path)
    _assign(node, tokens[-1], value, key_path)
    logger.debug("[Config] Override %s = %r", key_path, value)


def _child(node: Any, token: str | int, empty: Any, key_path: str) -> Any:
    _check_container(node, token, key_path)
    if isinstance(node, list):
        assert isinstance(token, int)
        node.extend([None] * (token + 1 - len(node)))
        missing = node[token] is None
    else:
        missing = token not in node
    if missing:
        node[token] = empty
    child = node[token]
    if not isinstance(child, type(empty)):
        raise ConfigurationError(f"Expected {type(empty).__name__} at {token!r} in {key_path}, got {type(child).__name__}")
    return child


def _assign(node: Any, token: str | int, value: Any, key_path: str) -> None:
    _check_container(node, token, key_path)
    if isinstance(node, list):
        assert isinstance(token, int)
        node.extend([None] * (token + 1 - len(node)))
    node[token] = value


def _check_container(node: Any, token: str | int, key_path: str) -> None:
    if isinstance(node, list) and not isinstance(token, int):
        raise ConfigurationError(f"Expected an integer index for a list in {key_path}, got {token!r}")
    if isinstance(node, dict) and not isinstance(token, str):
        raise ConfigurationError(f"Expected a key for a mapping in {key_path}, got [{token}]")


def parse_override(override: str) -> tuple[str, Any]:
    """Split ``key.path=value`` and parse the value as a YAML scalar or flow collection.

    Args:
        override (str): The override expression.

    Returns:
        tuple[str, Any]: Key path and parsed value.

    Raises:
        ConfigurationError: If the expression has no ``=`` or the value is not valid YAML.
    """
    key_path, sep, raw_value = override.partition("=")
    if not sep or not key_path.strip():
        raise ConfigurationError(f"Override must look like key.path=value, got {override!r}")
    try:
        value = YAML(typ="safe").load(io.StringIO(raw_value))
    except YAMLError as exception:
        raise ConfigurationError(f"Invalid value in override {override!r}: {exception}") from exception
    return key_path.strip(), value


def apply_overrides(dictionary: dict[str, Any], overrides: Iterable[str]) -> dict[str, Any]:
    """Apply ``key.path=value`` overrides to a raw config mapping.

    Args:
        dictionary (dict[str, Any]): The raw mapping, modified in place.
        overrides (Iterable[str]): Override expressions, applied in order.

    Returns:
        dict[str, Any]: The same mapping, for chaining.
    """
    for override in overrides:
        key_path, value = parse_override(override)
        set_value_to_dict(dictionary, key_path, value)
    return dictionary
