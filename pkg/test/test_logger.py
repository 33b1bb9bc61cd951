import logging
from io import StringIO

import pytest

from thc_threshold_bandit.observability.logger import BanditLogger, LogLevel, ansi_format, configure_logger, logger


@pytest.fixture(scope="function")
def string_handler():
    """Create a StringIO handler for capturing log output."""
    stream = StringIO()
    handler = logging.StreamHandler(stream)
    handler.stream = stream
    return handler


@pytest.fixture(scope="function")
def restore_global_logger():
    """Restore the package logger's level and handlers after a test."""
    level, handlers = logger.level, logger.handlers.copy()
    yield logger
    for handler in logger.handlers:
        if handler not in handlers:
            handler.close()
    logger.handlers = handlers
    logger.setLevel(level)
    for handler in handlers:
        handler.setLevel(level)


class TestAnsiFormat:
    """Test cases for ansi_format function."""

    def test_bold(self):
        assert ansi_format("test", color="\033[31m") == "\033[31m\033[1mtest\033[0m"

    def test_no_bold(self):
        assert ansi_format("test", color="\033[34m", bold=False) == "\033[34mtest\033[0m"

    def test_empty_text(self):
        assert ansi_format("", color="\033[32m") == "\033[32m\033[1m\033[0m"


class TestLogLevel:
    """Test cases for LogLevel enum."""

    def test_values(self):
        assert [level.value for level in LogLevel] == ["ERROR", "WARNING", "INFO", "DEBUG", "CRITICAL"]

    def test_numeric(self):
        assert LogLevel.ERROR.numeric == logging.ERROR
        assert LogLevel.DEBUG.numeric == logging.DEBUG
        assert LogLevel.CRITICAL.numeric == logging.CRITICAL


class TestBanditLogger:
    """Test cases for BanditLogger class."""

    def test_initialization_default(self):
        bandit_logger = BanditLogger()
        assert bandit_logger.name == "thc_threshold_bandit"
        assert bandit_logger.level == logging.INFO
        assert len(bandit_logger.handlers) == 1

    def test_attach_uses_logger_formatter(self, string_handler):
        formatter = logging.Formatter("%(levelname)s|%(message)s")
        bandit_logger = BanditLogger(name="test_logger", level=logging.DEBUG, formatter=formatter, handlers=[string_handler])
        bandit_logger.debug("hello")
        assert string_handler.stream.getvalue() == "DEBUG|hello\n"
        assert string_handler.level == logging.DEBUG

    @pytest.mark.parametrize(
        "level,color",
        [
            (LogLevel.ERROR, "\033[31m"),
            (LogLevel.WARNING, "\033[33m"),
            (LogLevel.INFO, "\033[34m"),
            (LogLevel.DEBUG, "\033[32m"),
            (LogLevel.CRITICAL, "\033[35m"),
        ],
    )
    def test_highlight(self, string_handler, level, color):
        """Highlighted messages carry the level's colour."""
        bandit_logger = BanditLogger(level=logging.DEBUG, handlers=[string_handler])
        bandit_logger.highlight(level, "[Sweep] message")
        output = string_handler.stream.getvalue()
        assert "[Sweep] message" in output
        assert color in output
        assert level.value in output

    def test_highlight_respects_level(self, string_handler):
        bandit_logger = BanditLogger(level=logging.WARNING, handlers=[string_handler])
        bandit_logger.highlight(LogLevel.INFO, "hidden")
        bandit_logger.highlight(LogLevel.ERROR, "shown")
        output = string_handler.stream.getvalue()
        assert "hidden" not in output
        assert "shown" in output


class TestConfigureLogger:
    """Test cases for configure_logger."""

    def test_level_name(self, restore_global_logger):
        configured = configure_logger("debug")
        assert configured is logger
        assert logger.level == logging.DEBUG
        assert all(handler.level == logging.DEBUG for handler in logger.handlers)

    def test_unknown_level(self, restore_global_logger):
        with pytest.raises(ValueError):
            configure_logger("LOUD")

    def test_log_file(self, restore_global_logger, tmp_path):
        log_file = tmp_path / "run.log"
        configure_logger(logging.INFO, log_file)
        logger.highlight(LogLevel.WARNING, "[Config] written to file")
        for handler in logger.handlers:
            handler.flush()
        assert "[Config] written to file" in log_file.read_text()
