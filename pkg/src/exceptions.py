"""Domain errors raised by the services."""

from src.schemas.common import ErrorCode, ErrorDetail


class LatticeToolError(Exception):
    """Error carrying one of the toolkit's error codes."""

    def __init__(self, code: ErrorCode, message: str) -> None:
        super().__init__(message)
        self.code = code
        self.message = message

    @property
    def detail(self) -> ErrorDetail:
        """Get the error as a report detail."""
        return ErrorDetail(code=self.code, message=self.message)

    def __str__(self) -> str:
        return f"{self.code.value}: {self.message}"
