"""Certificate schemas."""

from typing import Any, Literal

from pydantic import BaseModel, Field

from src.schemas.lattice import LatticeFile

CertificateKind = Literal[
    "lattice-info",
    "disc",
    "similar",
    "roots",
    "reflect",
    "decompose",
    "vinberg",
    "reflective",
    "reduce-w2",
    "mukai-moduli",
    "tyurin",
    "corr-decompose",
    "generators",
    "aut-orders",
]


class Certificate(BaseModel):
    """Replayable record of a command: its inputs and its result."""

    kind: CertificateKind
    version: str
    conventions: list[str]
    lattice: LatticeFile | None = None
    inputs: dict[str, Any] = Field(default_factory=dict)
    result: dict[str, Any]


class VerifyResult(BaseModel):
    """Outcome of replaying a certificate."""

    kind: CertificateKind
    checks: list[str]
    ok: bool
