"""Diagnostics shared by the PDDL lexer, parser and validator."""

from __future__ import annotations

from dataclasses import dataclass

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Issue:
    severity: str
    code: str
    message: str
    line: int | None = None
    col: int | None = None

    def format(self, filename: str = "<input>") -> str:
        """Render as ``file:line:col: severity CODE message``."""
        where = filename
        if self.line is not None:
            where = f"{filename}:{self.line}:{self.col if self.col is not None else 1}"
        return f"{where}: {self.severity} {self.code} {self.message}"

    def to_dict(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "message": self.message,
            "line": self.line,
            "col": self.col,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Issue:
        return cls(data["severity"], data["code"], data["message"], data.get("line"), data.get("col"))


def error(code: str, message: str, line: int | None = None, col: int | None = None) -> Issue:
    return Issue(ERROR, code, message, line, col)


def warning(code: str, message: str, line: int | None = None, col: int | None = None) -> Issue:
    return Issue(WARNING, code, message, line, col)


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...] = ()

    @property
    def ok(self) -> bool:
        return not any(i.severity == ERROR for i in self.issues)

    @property
    def errors(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if i.severity == ERROR)

    def codes(self) -> list[str]:
        return [i.code for i in self.issues]

    def format(self, filename: str = "<input>") -> str:
        return "\n".join(i.format(filename) for i in self.issues)


class PddlError(ValueError):
    """Raised when PDDL text cannot be turned into a well-formed AST."""

    def __init__(self, issues: list[Issue] | tuple[Issue, ...]):
        self.issues = tuple(issues)
        super().__init__("; ".join(i.format() for i in self.issues) or "PDDL error")

    @property
    def code(self) -> str:
        return self.issues[0].code if self.issues else "PDDL_ERROR"

    def codes(self) -> list[str]:
        return [i.code for i in self.issues]
