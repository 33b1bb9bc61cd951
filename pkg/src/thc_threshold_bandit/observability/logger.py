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
"""Logger for the threshold bandit simulator.

Provides a logger with ANSI highlighted output for experiment progress, and a helper to retarget its level and
handlers from the command line.
"""

import logging
import sys
from enum import Enum
from pathlib import Path

_RESET = "\033[0m"
_BOLD = "\033[1m"
_DEFAULT_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


class LogLevel(Enum):
    """Levels accepted by :meth:`BanditLogger.highlight`, each mapped to a terminal colour."""

    ERROR = "ERROR"
    WARNING = "WARNING"
    INFO = "INFO"
    DEBUG = "DEBUG"
    CRITICAL = "CRITICAL"

    @property
    def color(self) -> str:
        """ANSI colour code used when highlighting a message at this level."""
        return {
            LogLevel.ERROR: "\033[31m",
            LogLevel.WARNING: "\033[33m",
            LogLevel.INFO: "\033[34m",
            LogLevel.DEBUG: "\033[32m",
            LogLevel.CRITICAL: "\033[35m",
        }[self]

    @property
    def numeric(self) -> int:
        """The matching :mod:`logging` level number."""
        return int(logging.getLevelName(self.value))


def ansi_format(text: str, color: str, bold: bool = True) -> str:
    """Wrap text in ANSI colour (and optionally bold) codes.

    Args:
        text (str): The text to format.
        color (str): ANSI colour escape sequence.
        bold (bool): Whether to apply bold formatting.

    Returns:
        str: The formatted text, terminated by a reset code.
    """
    return color + (_BOLD if bold else "") + text + _RESET


class BanditLogger(logging.Logger):
    """Logger with colour highlighting for simulator progress and failures.

    Attributes:
        formatter (logging.Formatter): Formatter shared by every handler of this logger.
    """

    def __init__(
        self,
        name: str = "thc_threshold_bandit",
        level: int = logging.INFO,
        formatter: logging.Formatter | None = None,
        handlers: list[logging.Handler] | None = None,
    ) -> None:
        """Initialize the logger.

        Args:
            name (str): Logger name.
            level (int): Logging level.
            formatter (logging.Formatter | None): Custom formatter, defaults to timestamp - level - message.
            handlers (list[logging.Handler] | None): Handlers to attach, defaults to a single stderr stream handler.
        """
        super().__init__(name, level)
        self.formatter = formatter or logging.Formatter(_DEFAULT_FORMAT)
        for handler in handlers or [logging.StreamHandler(stream=sys.stderr)]:
            self.attach(handler)

    def attach(self, handler: logging.Handler) -> None:
        """Attach a handler using this logger's level and formatter.

        Args:
            handler (logging.Handler): The handler to attach.
        """
        handler.setLevel(self.level)
        handler.setFormatter(self.formatter)
        self.addHandler(handler)

    def highlight(self, level: LogLevel, message: str) -> None:
        """Log a message coloured according to its level.

        Args:
            level (LogLevel): Level and colour of the message.
            message (str): The message.
        """
        self.log(level.numeric, ansi_format(text=message, color=level.color))


def configure_logger(level: str | int = logging.INFO, log_file: str | Path | None = None) -> BanditLogger:
    """Set the level of the package logger and optionally mirror it into a file.

    Args:
        level (str | int): Level name (e.g. "DEBUG") or number.
        log_file (str | Path | None): Optional path of a log file to append to.

    Returns:
        BanditLogger: The package logger.
    """
    numeric = level if isinstance(level, int) else logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level: {level}")
    logger.setLevel(numeric)
    for handler in logger.handlers:
        handler.setLevel(numeric)
    if log_file is not None:
        logger.attach(logging.FileHandler(filename=str(log_file)))
    return logger


logger = BanditLogger()
