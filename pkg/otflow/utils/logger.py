"""
Logging Utilities - Package-wide logging for solvers, trainers and experiments

All otflow modules log through named children of the ``otflow`` logger. Records carry
the calling class (or function) name so solver, trainer and runner lines can be told
apart in long training logs.
"""

import inspect
import logging
import sys
import threading
from dataclasses import dataclass
from typing import Dict, Optional


class ColorCode:
    """ANSI color codes"""
    RED = "\033[31m"
    GREEN = "\033[32m"
    YELLOW = "\033[33m"
    BLUE = "\033[34m"
    CYAN = "\033[36m"
    WHITE = "\033[37m"
    BOLD = "\033[1m"
    RESET = "\033[0m"
    BOLD_RED = BOLD + RED


class LevelColor:
    """Log level color mapping"""
    DEBUG = ColorCode.CYAN
    INFO = ColorCode.GREEN
    WARNING = ColorCode.YELLOW
    ERROR = ColorCode.RED
    CRITICAL = ColorCode.BOLD_RED


ROOT_LOGGER_NAME = "otflow"


@dataclass
class LoggerConfig:
    """
    Logger configuration

    Attributes:
        level: Minimum level name (DEBUG, INFO, ...)
        format: Record format; the four ``|``-separated fields are colored separately
        enable_colors: Emit ANSI colors on the console handler
        log_file: Optional path of an additional plain-text handler
    """
    level: str = "INFO"
    format: str = "%(asctime)s | %(levelname)s | %(classname)s | %(message)s"
    enable_colors: bool = True
    log_file: Optional[str] = None


class ColoredFormatter(logging.Formatter):
    """Colored log formatter"""

    def __init__(self, config: LoggerConfig):
        super().__init__(config.format)
        self.config = config
        self.level_colors = {
            logging.DEBUG: LevelColor.DEBUG,
            logging.INFO: LevelColor.INFO,
            logging.WARNING: LevelColor.WARNING,
            logging.ERROR: LevelColor.ERROR,
            logging.CRITICAL: LevelColor.CRITICAL,
        }

    def format(self, record: logging.LogRecord) -> str:
        if not hasattr(record, "classname"):
            record.classname = record.name.split(".")[-1] if record.name else "Unknown"

        formatted = super().format(record)
        if not self.config.enable_colors:
            return formatted

        parts = formatted.split(" | ", 3)
        if len(parts) != 4:
            color = self.level_colors.get(record.levelno, ColorCode.WHITE)
            return formatted.replace(record.levelname, f"{color}{record.levelname}{ColorCode.RESET}", 1)

        time_part, level_part, classname_part, message_part = parts
        level_color = self.level_colors.get(record.levelno, ColorCode.WHITE)
        return (
            f"{ColorCode.GREEN}{time_part}{ColorCode.RESET} | "
            f"{level_color}{level_part}{ColorCode.RESET} | "
            f"{ColorCode.BLUE}{classname_part}{ColorCode.RESET} | "
            f"{message_part}"
        )


class PlainFormatter(logging.Formatter):
    """Formatter for file handlers; fills in ``classname`` when absent"""

    def format(self, record: logging.LogRecord) -> str:
        if not hasattr(record, "classname"):
            record.classname = record.name.split(".")[-1] if record.name else "Unknown"
        return super().format(record)


class OTFlowLogger:
    """
    otflow logger

    Thin wrapper around :class:`logging.Logger` that tags every record with the
    name of the calling class or function.
    """

    def __init__(self, name: str = ROOT_LOGGER_NAME, config: Optional[LoggerConfig] = None):
        self.name = name
        self.config = config or LoggerConfig()
        self._logger = logging.getLogger(name)
        if name == ROOT_LOGGER_NAME:
            self._setup_root()

    def _setup_root(self) -> None:
        self._logger.setLevel(getattr(logging, self.config.level.upper()))
        self._logger.handlers.clear()
        self._logger.propagate = False

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(ColoredFormatter(self.config))
        self._logger.addHandler(console_handler)

        if self.config.log_file:
            self.add_file_handler(self.config.log_file)

    def add_file_handler(self, path: str) -> None:
        """Attach a plain-text file handler to the root otflow logger"""
        root = logging.getLogger(ROOT_LOGGER_NAME)
        handler = logging.FileHandler(path, encoding="utf-8")
        handler.setFormatter(PlainFormatter(self.config.format))
        root.addHandler(handler)

    @staticmethod
    def _calling_classname() -> str:
        frame = inspect.currentframe()
        try:
            # 0: this helper, 1: the log method, 2: the caller
            caller = frame.f_back.f_back if frame and frame.f_back else None
            if caller is None:
                return "Unknown"
            if "self" in caller.f_locals:
                return type(caller.f_locals["self"]).__name__
            if caller.f_code.co_name != "<module>":
                return caller.f_code.co_name
            return str(caller.f_globals.get("__name__", "Unknown")).split(".")[-1]
        finally:
            del frame

    def get_logger(self) -> logging.Logger:
        """Get underlying logger"""
        return self._logger

    def set_level(self, level: str) -> None:
        """Set log level"""
        self._logger.setLevel(getattr(logging, level.upper()))

    def is_enabled_for(self, level: int) -> bool:
        return self._logger.isEnabledFor(level)

    def debug(self, message: str) -> None:
        self._logger.debug(message, extra={"classname": self._calling_classname()})

    def info(self, message: str) -> None:
        self._logger.info(message, extra={"classname": self._calling_classname()})

    def warning(self, message: str) -> None:
        self._logger.warning(message, extra={"classname": self._calling_classname()})

    def error(self, message: str) -> None:
        self._logger.error(message, extra={"classname": self._calling_classname()})


_logger_instances: Dict[str, OTFlowLogger] = {}
_logger_lock = threading.Lock()


def get_logger(name: str = ROOT_LOGGER_NAME, config: Optional[LoggerConfig] = None) -> OTFlowLogger:
    """
    Get or create a logger instance with thread safety

    Module loggers are children of the ``otflow`` root, so configuring the root
    (level, file handler) applies to every module.

    Args:
        name: Logger name, usually ``__name__`` of the calling module
        config: Logger configuration, only honoured on first creation of the root

    Returns:
        OTFlowLogger instance
    """
    with _logger_lock:
        if ROOT_LOGGER_NAME not in _logger_instances:
            root_config = config if name == ROOT_LOGGER_NAME else None
            _logger_instances[ROOT_LOGGER_NAME] = OTFlowLogger(ROOT_LOGGER_NAME, root_config)
        if name not in _logger_instances:
            _logger_instances[name] = OTFlowLogger(name, config)
        return _logger_instances[name]


def get_otflow_logger() -> logging.Logger:
    """
    Get the root otflow logger

    Returns:
        Underlying :class:`logging.Logger` of the package root
    """
    return get_logger(ROOT_LOGGER_NAME).get_logger()


def configure_logging(verbose: bool = False, log_file: Optional[str] = None) -> logging.Logger:
    """
    Configure the package root logger for command-line use

    Args:
        verbose: Lower the level to DEBUG
        log_file: Optional path of an additional plain-text log file

    Returns:
        The configured root logger
    """
    root = get_logger(ROOT_LOGGER_NAME)
    root.set_level("DEBUG" if verbose else "INFO")
    base = root.get_logger()
    for handler in [h for h in base.handlers if isinstance(h, logging.FileHandler)]:
        base.removeHandler(handler)
        handler.close()
    if log_file:
        root.add_file_handler(log_file)
    return root.get_logger()
