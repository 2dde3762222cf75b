"""Lattice-related schemas."""

from typing import Literal

from pydantic import BaseModel, Field

from src.schemas.common import DomainModel, RationalValue, VectorQ


class Lattice(DomainModel):
    """Integral nondegenerate symmetric bilinear form given by its Gram matrix."""

    gram: tuple[tuple[int, ...], ...]
    det: int
    name: str | None = None

    @property
    def rank(self) -> int:
        """Get the rank (matrix dimension)."""
        return len(self.gram)


class LatticeFile(BaseModel):
    """On-disk lattice format."""

    name: str | None = None
    gram: list[list[int]] = Field(..., min_length=1)


class Signature(DomainModel):
    """Inertia of the real form."""

    positive: int
    negative: int

    def is_hyperbolic(self) -> bool:
        """Check for signature (1, rank - 1)."""
        return self.positive == 1


class DiscriminantForm(DomainModel):
    """Discriminant group A_L = L*/L with its bilinear and quadratic forms.

    b_values are reduced into [0, 1) and q_values into [0, 2).
    """

    invariant_factors: tuple[int, ...]
    generators: tuple[VectorQ, ...]
    b_values: tuple[tuple[RationalValue, ...], ...]
    q_values: tuple[RationalValue, ...] | None = None

    @property
    def order(self) -> int:
        """Get |A_L|."""
        order = 1
        for factor in self.invariant_factors:
            order *= factor
        return order


class LatticeInfo(BaseModel):
    """Summary of a lattice's invariants."""

    name: str | None
    gram: list[list[int]]
    rank: int
    det: int
    signature: Signature
    even: bool
    hyperbolic: bool
    unimodular: bool


class IsomorphismResult(DomainModel):
    """Outcome of the bounded isomorphism search."""

    status: Literal["found", "rejected", "not_found_within_bound"]
    witness: tuple[tuple[int, ...], ...] | None = None
    reason: str | None = None
    height_bound: int


class SimilarityResult(DomainModel):
    """Outcome of the similarity test L(m) = M."""

    similar: bool | None
    scale: RationalValue | None = None
    isomorphism: IsomorphismResult | None = None
