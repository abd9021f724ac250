"""Logging configuration with stderr and optional file output.

- Diagnostics go to stderr; stdout is reserved for results.
- With a log directory configured, each invocation also writes a timestamped
  ``absent-votes-YYYYMMDD-HHMMSS.log`` there.
- Old log files are removed by mtime according to the retention setting.
"""

import logging
from datetime import datetime, timedelta
from pathlib import Path

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def setup_logging(
    log_dir: Path | None = None,
    retention_days: int = 7,
    verbose: bool = False,
) -> logging.Logger:
    """Configure the ``absent_votes`` logger.

    Args:
        log_dir: Directory for log files; None disables file logging.
        retention_days: Number of days to keep log files.
        verbose: If True, set log level to DEBUG.

    Returns:
        Configured package logger.
    """
    if verbose:
        level = logging.DEBUG
    elif log_dir is None:
        level = logging.WARNING
    else:
        level = logging.INFO

    logger = logging.getLogger("absent_votes")
    logger.setLevel(level)
    logger.handlers.clear()

    stderr_handler = logging.StreamHandler()
    stderr_handler.setLevel(level)
    stderr_handler.setFormatter(logging.Formatter(LOG_FORMAT, DATE_FORMAT))
    logger.addHandler(stderr_handler)

    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)
        cleanup_old_logs(log_dir, retention_days)
        log_file = log_dir / f"absent-votes-{datetime.now():%Y%m%d-%H%M%S}.log"
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT, DATE_FORMAT))
        logger.addHandler(file_handler)
        logger.info("Logging initialized: %s", log_file)

    return logger


def cleanup_old_logs(log_dir: Path, retention_days: int) -> int:
    """Remove log files older than retention_days.

    Args:
        log_dir: Directory containing log files.
        retention_days: Number of days to keep logs. Set to 0 to disable cleanup.

    Returns:
        Number of files removed.
    """
    if retention_days <= 0:
        return 0

    cutoff = datetime.now() - timedelta(days=retention_days)
    removed = 0
    for log_file in log_dir.glob("absent-votes-*.log"):
        if log_file.stat().st_mtime < cutoff.timestamp():
            log_file.unlink()
            removed += 1
    return removed
