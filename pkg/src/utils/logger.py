"""
Logging configuration for the wave asymptotics toolkit
Sets up console and rotating file logging for batch runs
"""

import logging
import logging.handlers
from pathlib import Path
from typing import Optional, Union


def setup_logging(log_level: Union[int, str] = logging.INFO, log_to_file: bool = False,
                  log_dir: Union[str, Path] = "logs"):
    """
    Setup application logging

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR) as int or name
        log_to_file: Whether to write logs to file
        log_dir: Directory for the rotating log files
    """
    if isinstance(log_level, str):
        log_level = getattr(logging, log_level.upper(), logging.INFO)

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler.setLevel(log_level)
    root_logger.addHandler(console_handler)

    if log_to_file:
        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)

        file_handler = logging.handlers.RotatingFileHandler(
            log_path / "toolkit.log",
            maxBytes=5*1024*1024,  # 5MB
            backupCount=5
        )
        file_handler.setFormatter(formatter)
        file_handler.setLevel(log_level)
        root_logger.addHandler(file_handler)

        error_handler = logging.handlers.RotatingFileHandler(
            log_path / "errors.log",
            maxBytes=5*1024*1024,  # 5MB
            backupCount=3
        )
        error_handler.setFormatter(formatter)
        error_handler.setLevel(logging.ERROR)
        root_logger.addHandler(error_handler)

    logging.info("Logging system initialized")


class RunLogger:
    """Logger for computation stages, results and acceptance checks"""

    def __init__(self, name: str):
        self.logger = logging.getLogger(name)

    @staticmethod
    def _details(kwargs: dict) -> str:
        return " | ".join([f"{k}={v}" for k, v in kwargs.items()])

    def stage(self, event: str, **kwargs):
        """Log the start or end of a computation stage"""
        message = f"STAGE: {event}"
        extra_info = self._details(kwargs)
        if extra_info:
            message += f" | {extra_info}"
        self.logger.info(message)

    def result(self, name: str, value, **kwargs):
        """Log a computed quantity"""
        message = f"RESULT: {name} = {value}"
        extra_info = self._details(kwargs)
        if extra_info:
            message += f" | {extra_info}"
        self.logger.info(message)

    def check(self, name: str, passed: bool, **kwargs):
        """Log an acceptance check outcome"""
        status = "PASS" if passed else "FAIL"
        message = f"CHECK: {name} -> {status}"
        extra_info = self._details(kwargs)
        if extra_info:
            message += f" | {extra_info}"
        if passed:
            self.logger.info(message)
        else:
            self.logger.warning(message)

    def row_failed(self, x, error: Exception, details: Optional[str] = None):
        """Log a sweep row that raised"""
        message = f"ROW: x={x} failed with {type(error).__name__}: {error}"
        if details:
            message += f" - {details}"
        self.logger.error(message)
