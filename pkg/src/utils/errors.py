from dataclasses import dataclass, field
from typing import Any

# Codes double as command-line exit codes.
INVALID_INPUT = 2
BUDGET_EXCEEDED = 3
INTERNAL_ERROR = 4


@dataclass
class ErrorData:
    """Error payload carried by every AutomataError."""

    code: int
    message: str
    data: dict[str, Any] = field(default_factory=dict)


class AutomataError(Exception):
    """Base error of the library; `error.code` is the CLI exit code."""

    def __init__(self, error: ErrorData):
        super().__init__(error.message)
        self.error = error

    @property
    def code(self) -> int:
        return self.error.code


class TimbukSyntaxError(AutomataError):
    """Malformed Timbuk document, with the 1-based position of the offence."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(
            ErrorData(
                code=INVALID_INPUT,
                message=f"line {line}, column {column}: {message}",
                data={"line": line, "column": column},
            )
        )
        self.line = line
        self.column = column


class BudgetExceededError(AutomataError):
    """A configured size budget was exceeded; the result is inconclusive."""

    def __init__(self, message: str, budget: int):
        super().__init__(
            ErrorData(code=BUDGET_EXCEEDED, message=message, data={"budget": budget})
        )
        self.budget = budget


def invalid_input(message: str, **data: Any) -> AutomataError:
    """Build the error raised for rejected arguments."""
    return AutomataError(ErrorData(code=INVALID_INPUT, message=message, data=data))
