"""
Tagged console logging: every record renders as ``[Tag] message`` on stderr.
"""

import logging
import sys
from typing import Optional

_ROOT = "bell"
_configured = False


def configure_logging(level: Optional[str] = None) -> None:
    """Install the stderr handler once and (re)set the level."""
    global _configured
    root = logging.getLogger(_ROOT)
    if not _configured:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("[%(tag)s] %(message)s"))
        handler.addFilter(_TagFilter())
        root.addHandler(handler)
        root.propagate = False
        _configured = True
    if level is None:
        from core.settings import get_settings
        level = get_settings().log_level
    root.setLevel(level.upper())


class _TagFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "tag"):
            record.tag = record.name.rsplit(".", 1)[-1]
        return True


def get_logger(tag: str) -> logging.Logger:
    """
    Get a logger whose records are prefixed with ``[tag]``.

    Args:
        tag: Short component name, e.g. "Threshold"

    Returns:
        Logger under the package root
    """
    if not _configured:
        configure_logging()
    return logging.getLogger(f"{_ROOT}.{tag}")
