"""Lightweight project logging utilities for the relaylab package.

This module provides a simple, centralized logger configuration you can
reuse across scripts, the CLI and library code.

Usage
-----

    from relaylab.relay_logger import get_logger

    logger = get_logger(__name__)
    logger.info("Starting sweep...")

Call ``setup_logging`` explicitly at application startup if you want to
override defaults (log level, file output).
"""

from __future__ import annotations

import logging
import logging.handlers
from typing import Optional

from .constants import LOG_DIR

LOG_FILE = LOG_DIR / "relaylab.log"

_CONFIGURED_FLAG = "_relaylab_logging_configured"


def setup_logging(level: int = logging.INFO, log_to_file: bool = False, force: bool = False) -> None:
    """Configure root logging for the project.

    This is idempotent; subsequent calls will not add duplicate handlers
    unless ``force`` is set, in which case the level is updated and a file
    handler is added if requested and missing.

    Args:
        level: Logging level for the root logger (e.g. ``logging.INFO``).
        log_to_file: Whether to also log to a rotating file under ``logs/``.
        force: Re-apply level and file settings on an already configured root.
    """

    root = logging.getLogger()
    configured = getattr(root, _CONFIGURED_FLAG, False)
    if configured and not force:
        return

    root.setLevel(level)
    console_fmt = logging.Formatter(
        "[%(asctime)s] [%(levelname)s] [%(name)s] %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    if not configured:
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(console_fmt)
        root.addHandler(console_handler)

    for handler in root.handlers:
        handler.setLevel(level)

    has_file = any(isinstance(h, logging.handlers.RotatingFileHandler) for h in root.handlers)
    if log_to_file and not has_file:
        LOG_DIR.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            LOG_FILE,
            maxBytes=5 * 1024 * 1024,  # 5 MB
            backupCount=3,
            encoding="utf-8",
        )
        file_handler.setLevel(level)
        file_handler.setFormatter(console_fmt)
        root.addHandler(file_handler)

    setattr(root, _CONFIGURED_FLAG, True)


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Return a logger configured for the relaylab project.

    If logging has not yet been configured via :func:`setup_logging`, it
    will be configured with default settings on first use.

    Args:
        name: Logger name. If ``None``, the root logger is returned.

    Returns:
        A :class:`logging.Logger` instance.
    """

    root = logging.getLogger()
    if not getattr(root, _CONFIGURED_FLAG, False):
        setup_logging()

    return logging.getLogger(name)


__all__ = ["get_logger", "setup_logging", "LOG_DIR", "LOG_FILE"]
