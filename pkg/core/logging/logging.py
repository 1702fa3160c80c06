import logging
import os
import sys
from typing import Optional


class Logger:
    _logger: Optional[logging.Logger] = None

    @classmethod
    def setup_logging(cls, level: Optional[str] = None):
        """
        Configure the main logger for the application.
        Read the log level from the LOG_LEVEL environment variable (default is INFO) unless a level is given.
        Logs go to stderr so stdout stays free for JSON results; LOG_FILE adds a file handler.
        """
        if cls._logger is not None:
            if level:
                cls.set_level(level)
            return

        log_level_str = (level or os.getenv("LOG_LEVEL", "INFO")).upper()
        log_level = getattr(logging, log_level_str, logging.INFO)

        console_handler = logging.StreamHandler(sys.stderr)
        handlers: list[logging.Handler] = [console_handler]

        log_file = os.getenv("LOG_FILE")
        if log_file:
            handlers.append(logging.FileHandler(log_file, mode="a", encoding="utf-8"))

        logging.basicConfig(
            level=log_level,
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            handlers=handlers
        )
        cls._logger = logging.getLogger("PovmCoherence")
        cls._logger.setLevel(log_level)
        cls._logger.debug(f"Logger configured with level: {log_level_str}")

    @classmethod
    def set_level(cls, level: str):
        log_level = getattr(logging, level.upper(), logging.INFO)
        cls.get_logger().setLevel(log_level)

    @classmethod
    def get_logger(cls) -> logging.Logger:
        """Helper to ensure logger is initialized before use."""
        if cls._logger is None:
            cls.setup_logging()
        return cls._logger

    @classmethod
    def debug(cls, message):
        cls.get_logger().debug(message)

    @classmethod
    def info(cls, message):
        cls.get_logger().info(message)

    @classmethod
    def warning(cls, message):
        cls.get_logger().warning(message)

    @classmethod
    def error(cls, message):
        cls.get_logger().error(message)

    @classmethod
    def critical(cls, message):
        cls.get_logger().critical(message)
