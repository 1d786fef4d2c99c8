"""Leveled diagnostics shared by the tokenizer, parser, interpreter, and gateway."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Level(str, Enum):
    FATAL = "fatal"
    WARNING = "warning"
    NOTICE = "notice"


@dataclass(frozen=True)
class Diagnostic:
    level: Level
    message: str
    line: int = 0
    column: int = 0

    def render(self) -> str:
        where = f" (line {self.line}" + (f", col {self.column})" if self.column else ")") if self.line else ""
        return f"{self.level.value}: {self.message}{where}"


class FatalError(Exception):
    """Raised where a script or input cannot be processed further.

    Carries a fatal Diagnostic so callers can log it with position info.
    """

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(message)
        self.diagnostic = Diagnostic(Level.FATAL, message, line, column)


def fatal(message: str, line: int = 0, column: int = 0) -> Diagnostic:
    return Diagnostic(Level.FATAL, message, line, column)


def warning(message: str, line: int = 0, column: int = 0) -> Diagnostic:
    return Diagnostic(Level.WARNING, message, line, column)


def notice(message: str, line: int = 0, column: int = 0) -> Diagnostic:
    return Diagnostic(Level.NOTICE, message, line, column)
