from dataclasses import dataclass
from typing import Any, Optional


class ToolkitError(Exception):
    """Base error; exit_code is what the CLI exits with"""

    exit_code: int = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class UsageError(ToolkitError):
    exit_code = 2


class DimensionMismatch(ToolkitError):
    exit_code = 2


class InvalidShape(ToolkitError):
    exit_code = 2


class InvalidCertificate(ToolkitError):
    exit_code = 1


class ConcordanceFailure(ToolkitError):
    exit_code = 1


class VerificationFailure(ToolkitError):
    """A construction produced something that does not check out"""

    exit_code = 1

    def __init__(self, detail: str, instance: Any = None):
        super().__init__(detail)
        self.instance = instance


class BudgetExhausted(ToolkitError):
    """Node/time/size budget ran out; partial carries whatever was proven"""

    exit_code = 3

    def __init__(self, detail: str, partial: Any = None):
        super().__init__(detail)
        self.partial = partial


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def passed(reason: str = "verified") -> Verdict:
    return Verdict(True, reason)


def failed(reason: str) -> Verdict:
    return Verdict(False, reason)
