"""Logging configuration shared by the CLI and scripts."""

import logging

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level: str = "INFO") -> None:
    """
    Configure the package logger with a single stream handler.

    Args:
        level: Logging level name (e.g. "DEBUG", "INFO").
    """
    root = logging.getLogger("coarse_toolkit")
    root.setLevel(level.upper())
    if not any(getattr(h, "_coarse_toolkit", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._coarse_toolkit = True  # type: ignore[attr-defined]
        root.addHandler(handler)
