from __future__ import annotations

from typing import List, Tuple


class QFTVerifyError(Exception):
    """Base class for every error raised by qftverify."""


class DimensionMismatchError(QFTVerifyError, ValueError):
    pass


class InvalidParameterError(QFTVerifyError, ValueError):
    pass


class NotUnitaryError(QFTVerifyError):
    pass


class NotHermitianError(QFTVerifyError):
    pass


class InvalidStateError(QFTVerifyError):
    pass


class InvalidChannelError(QFTVerifyError):
    pass


class ChannelConstructionError(QFTVerifyError):
    """A channel produced a quantity its Kraus form rules out."""


class InternalConsistencyError(QFTVerifyError):
    """Two independent evaluation routes disagree; this is a bug, not a failed bound."""


class ReportIOError(QFTVerifyError):
    pass


class ConfigError(QFTVerifyError):
    def __init__(self, message: str, errors: List[Tuple[str, str]] | None = None):
        super().__init__(message)
        self.errors: List[Tuple[str, str]] = list(errors or [])

    def __str__(self) -> str:
        if not self.errors:
            return super().__str__()
        lines = [super().__str__()]
        lines.extend(f"  {loc}: {msg}" for loc, msg in self.errors)
        return "\n".join(lines)
