import os
import sys
import traceback
import threading
import inspect

from typing import Optional, Union, Literal, List, Dict, Any, TextIO
from .interfaces import LogLevel, LogRecord, Handler, Filter

LevelLike = Union[LogLevel, Literal['DEBUG', 'INFO', 'WARN', 'WARNING', 'ERROR', 'CRITICAL'], int]


# Converts a level given as enum, name or number into a LogLevel.
def _as_level(level: LevelLike) -> LogLevel:
    if isinstance(level, LogLevel):
        return level
    if isinstance(level, str):
        return LogLevel[level.upper()]
    return LogLevel(level)


# Defines a custom Logger class.
class Logger:
    """
    A custom logger class for formatted and level-based logging.
    It captures the call site (file, line, function) of every record.

    Loggers created by name are children of the shared ``root`` logger:
    a child without its own level defers to the root, and a child without
    handlers hands its records to the root, which writes them to stderr.
    Stdout is left to command output.
    """

    def __init__(self, name: str, level: Optional[LevelLike] = None, parent: Optional["Logger"] = None):
        """
        Initializes the Logger.

        Args:
            name: The name of the logger (e.g., __name__).
            level: The minimum level to output. None defers to the parent.
            parent: The logger records propagate to. Defaults to ``root``.
        """
        self.name: str = name
        self.level: Optional[LogLevel] = _as_level(level) if level is not None else None
        self.handlers: List[Handler] = []
        self.filters: List[Filter] = []
        self.propagate: bool = True
        self.disabled: bool = False
        self.parent: Optional[Logger] = parent if parent is not None else _ROOT
        self.stream: Optional[TextIO] = None

    # The core logging method.
    def log(self, level: LogLevel, msg: str, *args: Any, **kwargs: Any) -> None:
        """
        Logs a message at a specific level.
        This is the internal method called by debug, info, warning, etc.

        Args:
            level: The LogLevel of the message.
            msg: The message string (can be a format string).
            *args: Arguments for the format string.
            **kwargs: Keyword arguments for the format string.
        """
        if self.disabled or level.value < self.get_effective_level().value:
            return

        msg_formatted: str = msg.format(*args, **kwargs) if (args or kwargs) else msg
        record: LogRecord = self._make_record(level, msg_formatted)

        for f in self.filters:
            if not f(record):
                return

        self._handle(record)

    # Builds a record, inspecting the stack for the caller's context.
    def _make_record(self, level: LogLevel, message: str) -> LogRecord:
        record: LogRecord = {
            'logger': self.name,
            'level': level,
            'message': message,
            'thread': threading.current_thread().name,
            'thread_id': threading.get_ident(),
            'process_id': os.getpid(),
        }
        try:
            frame = inspect.currentframe()
            # log() <- debug()/info()/... <- caller
            caller = frame.f_back.f_back.f_back if (frame and frame.f_back and frame.f_back.f_back) else None
            if caller:
                info = inspect.getframeinfo(caller)
                record.update({'file': info.filename, 'line': info.lineno, 'function': info.function})
        except Exception:
            pass
        return record

    # Sends a record to handlers, the parent, or the default stream.
    def _handle(self, record: LogRecord) -> None:
        if self.handlers:
            for h in self.handlers:
                h(record)
        elif self.propagate and self.parent is not None:
            self.parent._handle(record)
        else:
            stream: TextIO = self.stream or sys.stderr
            stream.write(f"[{record['level'].name}] {record['logger']}: {record['message']}\n")

    # Logs a DEBUG level message.
    def debug(self, msg: str, *args: Any, **kwargs: Any) -> None:
        """Logs a message with level DEBUG."""
        self.log(LogLevel.DEBUG, msg, *args, **kwargs)

    # Logs an INFO level message.
    def info(self, msg: str, *args: Any, **kwargs: Any) -> None:
        """Logs a message with level INFO."""
        self.log(LogLevel.INFO, msg, *args, **kwargs)

    # Logs a WARNING level message.
    def warning(self, msg: str, *args: Any, **kwargs: Any) -> None:
        """Logs a message with level WARNING."""
        self.log(LogLevel.WARNING, msg, *args, **kwargs)

    # Logs an ERROR level message.
    def error(self, msg: str, *args: Any, **kwargs: Any) -> None:
        """Logs a message with level ERROR."""
        self.log(LogLevel.ERROR, msg, *args, **kwargs)

    # Logs a CRITICAL level message.
    def critical(self, msg: str, *args: Any, **kwargs: Any) -> None:
        """Logs a message with level CRITICAL."""
        self.log(LogLevel.CRITICAL, msg, *args, **kwargs)

    # Logs an ERROR level message with exception info.
    def exception(self, msg: str, *args: Any, **kwargs: Any) -> None:
        """Logs a message with level ERROR and appends exception traceback."""
        exc_info: str = traceback.format_exc()
        self.log(LogLevel.ERROR, f"{msg}\n{exc_info}", *args, **kwargs)

    def add_handler(self, handler: Handler) -> None:
        """Adds a handler function that will be called with the log record."""
        self.handlers.append(handler)

    def remove_handler(self, handler: Handler) -> None:
        """Removes a previously added handler function."""
        self.handlers.remove(handler)

    def add_filter(self, filter_func: Filter) -> None:
        """Adds a filter function. If it returns False, the log is dropped."""
        self.filters.append(filter_func)

    def remove_filter(self, filter_func: Filter) -> None:
        """Removes a previously added filter function."""
        self.filters.remove(filter_func)

    # Sets the logger's minimum output level.
    def set_level(self, level: Optional[LevelLike]) -> None:
        """Changes the logger's minimum output level (None defers to the parent)."""
        self.level = _as_level(level) if level is not None else None

    def is_enabled_for(self, level: LogLevel) -> bool:
        """Returns True if the logger is enabled for the given level."""
        return not self.disabled and level.value >= self.get_effective_level().value

    # Gets the effective log level.
    def get_effective_level(self) -> LogLevel:
        """
        Gets the effective log level.
        If self.level is not set, it checks the parent.
        """
        if self.level is not None:
            return self.level
        if self.parent is not None:
            return self.parent.get_effective_level()
        return LogLevel.WARNING


_ROOT: Optional[Logger] = None
root: Logger = Logger("root", LogLevel.WARNING, parent=None)
root.parent = None
_ROOT = root

_REGISTRY: Dict[str, Logger] = {"root": root}


# Returns the shared logger registered under a name, creating it once.
def getLogger(name: str) -> Logger:
    if name not in _REGISTRY:
        _REGISTRY[name] = Logger(name)
    return _REGISTRY[name]


# Sets the root level (and optionally its output stream) for every child logger.
def configure(level: LevelLike, stream: Optional[TextIO] = None) -> None:
    """
    Applies process-wide logging settings.

    Args:
        level: The new root level, e.g. the value of ``logging.level`` in data/config.json.
        stream: Where the root writes records; None keeps stderr.
    """
    root.set_level(level)
    root.stream = stream
