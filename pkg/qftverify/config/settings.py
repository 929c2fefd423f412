from __future__ import annotations

import logging
import os
import threading
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

__settings: Optional["Settings"] = None
__lock = threading.Lock()


@dataclass(frozen=True)
class Settings:
    log_level: int
    workers: int
    report_dir: str
    max_qubits: int


def _int_env(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, str(default)))
    except ValueError:
        return default


def _build_settings() -> Settings:
    log_level_str = os.getenv("LOG_LEVEL", "INFO").upper()
    log_level = getattr(logging, log_level_str, logging.INFO)
    if not isinstance(log_level, int):
        log_level = logging.INFO

    workers = max(1, _int_env("QFTV_WORKERS", 1))
    max_qubits = min(10, max(1, _int_env("QFTV_MAX_QUBITS", 10)))

    return Settings(
        log_level=log_level,
        workers=workers,
        report_dir=os.getenv("QFTV_REPORT_DIR", "reports"),
        max_qubits=max_qubits,
    )


def get_settings() -> Settings:
    """Return the process-wide settings, reading the environment on first use.
    """
    global __settings
    if __settings is None:
        with __lock:
            if __settings is None:
                __settings = _build_settings()
    return __settings


def reset_settings() -> None:
    global __settings
    with __lock:
        __settings = None


def configure_logging(level: Optional[int] = None) -> None:
    logging.basicConfig(
        level=level if level is not None else get_settings().log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        force=True
    )


__all__ = [
    "Settings",
    "get_settings",
    "reset_settings",
    "configure_logging",
]
