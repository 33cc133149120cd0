"""
Logging Setup Module
One-call logging configuration for the CLI and the dashboard
"""

import logging

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: int = logging.INFO) -> None:
    """
    Configure the root logger once

    Args:
        level (int): Logging level for the root logger
    """
    root = logging.getLogger()
    if not root.handlers:
        logging.basicConfig(level=level, format=LOG_FORMAT)
    root.setLevel(level)
