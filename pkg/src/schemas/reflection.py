"""Reflection-related schemas."""

from typing import Literal

from src.schemas.common import DomainModel, RationalMatrix, RationalValue, VectorZ
from src.schemas.lattice import Lattice


class IsometryQ(DomainModel):
    """Rational isometry of L⊗ℚ, acting on column vectors in the standard basis."""

    matrix: RationalMatrix
    ambient: Lattice

    @property
    def rank(self) -> int:
        """Get the dimension of the space acted on."""
        return int(self.matrix.rows)


class Root(DomainModel):
    """Root δ of a lattice: δ² ≠ 0 and δ² divides 2(δ·L)."""

    vector: VectorZ
    norm: int
    priority: RationalValue | None = None


class ReflectionWord(DomainModel):
    """Signed product of reflections.

    The mirrors are listed as the product is written, so the last mirror acts
    first: mirrors [H_m, ..., H_1] evaluate to sign · s_{H_m} ⋯ s_{H_1}.
    """

    sign: Literal[1, -1] = 1
    mirrors: tuple[VectorZ, ...] = ()

    def __len__(self) -> int:
        return len(self.mirrors)


class ReflectionClass(DomainModel):
    """Positive/negative classification of a reflection."""

    mirror: VectorZ
    norm: int
    kind: Literal["positive", "negative"]
    integral: bool


class ReflectionReport(DomainModel):
    """Reflection matrix with its root and integrality data."""

    mirror: VectorZ
    matrix: RationalMatrix
    classification: ReflectionClass
    is_root: bool


class DecompositionReport(DomainModel):
    """Isometry with a reflection word reproducing it."""

    matrix: RationalMatrix
    word: ReflectionWord
