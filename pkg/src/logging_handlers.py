import logging
from typing import Dict, List

# Configure module-specific logger
logger = logging.getLogger(__name__)


class DiagnosticsLogHandler(logging.Handler):
    """
    A logging handler that keeps log records in memory so a command can
    attach them to its report. Only keeps WARNING level messages and above.
    """

    def __init__(self, level=logging.WARNING):
        super().__init__(level)
        self.records: List[Dict[str, str]] = []
        self.formatter = logging.Formatter("%(message)s")

    def emit(self, record):
        """Store the level, logger name and message of the record."""
        if record.levelno < self.level:
            return

        msg = record.getMessage()

        # Add error traceback if available
        if record.exc_info:
            exc_text = self.formatter.formatException(record.exc_info)
            msg += "\n" + exc_text

        self.records.append({"level": record.levelname, "logger": record.name, "message": msg})

    def clear(self):
        self.records = []


def setup_diagnostics_logger(level=logging.WARNING) -> DiagnosticsLogHandler:
    """
    Set up a diagnostics handler on the root logger.

    Args:
        level: The minimum log level to keep (default: WARNING)

    Returns:
        The installed handler; its `records` fill as the command runs
    """
    handler = DiagnosticsLogHandler(level)

    # Add the handler to the root logger
    root_logger = logging.getLogger()
    root_logger.addHandler(handler)

    logger.debug("Diagnostics logger has been configured")
    return handler


def remove_diagnostics_logger(handler: DiagnosticsLogHandler) -> None:
    logging.getLogger().removeHandler(handler)
