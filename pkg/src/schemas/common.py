"""Common schemas for reports, errors and exact values."""

import re
from enum import Enum
from typing import Annotated, Any, Generic, TypeVar

from pydantic import BaseModel, ConfigDict, PlainSerializer, PlainValidator
from sympy import ImmutableMatrix, Integer, Rational, SympifyError

_RATIONAL_TEXT = re.compile(r"[+-]?\d+(/\d+)?")


class ErrorCode(str, Enum):
    """Error codes for reports."""

    NOT_SQUARE = "NOT_SQUARE"
    NOT_SYMMETRIC = "NOT_SYMMETRIC"
    DEGENERATE = "DEGENERATE"
    DIMENSION_MISMATCH = "DIMENSION_MISMATCH"
    NON_INTEGRAL_RESCALE = "NON_INTEGRAL_RESCALE"
    INVALID_ARGUMENT = "INVALID_ARGUMENT"
    ZERO_VECTOR = "ZERO_VECTOR"
    ISOTROPIC_MIRROR = "ISOTROPIC_MIRROR"
    AMBIENT_MISMATCH = "AMBIENT_MISMATCH"
    NOT_ISOMETRY = "NOT_ISOMETRY"
    WRONG_RANK = "WRONG_RANK"
    NOT_HYPERBOLIC = "NOT_HYPERBOLIC"
    BAD_CONTROLLER = "BAD_CONTROLLER"
    RANK_TOO_LARGE = "RANK_TOO_LARGE"
    NON_INTEGRAL_INPUT = "NON_INTEGRAL_INPUT"
    WALK_BUDGET_EXCEEDED = "WALK_BUDGET_EXCEEDED"
    NOT_ADMISSIBLE = "NOT_ADMISSIBLE"
    WRONG_SIGN = "WRONG_SIGN"
    ODD_NORM = "ODD_NORM"
    OUT_OF_RANGE = "OUT_OF_RANGE"
    MALFORMED_INPUT = "MALFORMED_INPUT"
    MALFORMED_CERTIFICATE = "MALFORMED_CERTIFICATE"
    REPLAY_MISMATCH = "REPLAY_MISMATCH"
    USAGE_ERROR = "USAGE_ERROR"
    INTERNAL_ERROR = "INTERNAL_ERROR"


class ErrorDetail(BaseModel):
    """Error detail model."""

    code: ErrorCode
    message: str


def parse_rational(value: Any) -> Rational:
    """Parse an exact rational from "p/q", "p", an int or a sympy number."""
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, Rational):
        return value
    if isinstance(value, int):
        return Integer(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_TEXT.fullmatch(text):
            raise ValueError(f"not a rational: {value!r}")
        try:
            parsed = Rational(text)
        except (ArithmeticError, TypeError, SympifyError) as e:
            raise ValueError(f"not a rational: {value!r}") from e
        if not isinstance(parsed, Rational):
            raise ValueError(f"not a finite rational: {value!r}")
        return parsed
    raise ValueError(f"not a rational: {value!r}")


def format_rational(value: Rational) -> str:
    """Format a rational as "p/q" in lowest terms, or "p" when q = 1."""
    value = Rational(value)
    if value.q == 1:
        return str(value.p)
    return f"{value.p}/{value.q}"


def parse_matrix(value: Any) -> ImmutableMatrix:
    """Parse a square matrix of exact rationals."""
    if isinstance(value, ImmutableMatrix):
        return value
    rows = [[parse_rational(entry) for entry in row] for row in value]
    if not rows:
        raise ValueError("empty matrix")
    return ImmutableMatrix(rows)


def format_matrix(value: ImmutableMatrix) -> list[list[str]]:
    """Format a matrix as nested lists of rational strings."""
    return [[format_rational(value[i, j]) for j in range(value.cols)] for i in range(value.rows)]


RationalValue = Annotated[
    Rational,
    PlainValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
]

RationalMatrix = Annotated[
    ImmutableMatrix,
    PlainValidator(parse_matrix),
    PlainSerializer(format_matrix, return_type=list[list[str]]),
]

VectorZ = tuple[int, ...]
VectorQ = tuple[RationalValue, ...]


class DomainModel(BaseModel):
    """Immutable base for domain values."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class ToolInfo(BaseModel):
    """Version response."""

    tool: str = "reflattice"
    version: str
    conventions: list[str]


class Provenance(BaseModel):
    """Where a report came from."""

    tool: str = "reflattice"
    version: str
    command: str
    input_digest: str
    conventions: list[str]


T = TypeVar("T")


class Report(BaseModel, Generic[T]):
    """Standard report wrapper."""

    success: bool
    data: T | None = None
    error: ErrorDetail | None = None
    provenance: Provenance | None = None

    @classmethod
    def ok(cls, data: T, provenance: Provenance | None = None) -> "Report[T]":
        """Create a successful report."""
        return cls(success=True, data=data, error=None, provenance=provenance)

    @classmethod
    def fail(
        cls, code: ErrorCode, message: str, provenance: Provenance | None = None
    ) -> "Report[Any]":
        """Create a failed report."""
        return cls(
            success=False,
            data=None,
            error=ErrorDetail(code=code, message=message),
            provenance=provenance,
        )


class BatchItem(BaseModel):
    """One entry of a batch report, keyed by its input file."""

    source: str
    success: bool
    data: Any = None
    error: ErrorDetail | None = None


class BatchReport(BaseModel):
    """Per-file results of a command run over several lattices."""

    items: list[BatchItem]
