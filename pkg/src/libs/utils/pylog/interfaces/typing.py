from typing import Any, Callable, Dict

# A log record as passed to handlers and filters.
LogRecord = Dict[str, Any]

Handler = Callable[[LogRecord], None]
Filter = Callable[[LogRecord], bool]
