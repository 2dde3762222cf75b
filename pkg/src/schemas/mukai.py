"""Mukai lattice and correspondence schemas."""

from typing import Literal

from pydantic import Field

from src.schemas.common import DomainModel, RationalMatrix, VectorZ
from src.schemas.lattice import IsomorphismResult, Lattice
from src.schemas.reflection import IsometryQ
from src.schemas.vinberg import FundamentalPolyhedron, WalkResult

MUKAI_CONVENTION = "mukai-basis:r,N,s;pairing:HH'-rs'-r's"
WORD_CONVENTION = "word-order:right-to-left"
GENERAL_CASE_ASSUMPTION = "transcendental-action-is-plus-minus-identity"


class MukaiVector(DomainModel):
    """Mukai vector v = (r, H, s) with H in the Picard lattice N."""

    r: int
    H: VectorZ
    s: int

    def coordinates(self) -> tuple[int, ...]:
        """Get coordinates in the (r, N, s) basis of U ⊕ N."""
        return (self.r, *self.H, self.s)


class AlgebraicMukaiLattice(DomainModel):
    """Algebraic Mukai lattice U ⊕ N with pairing H·H′ − rs′ − r′s."""

    picard: Lattice
    total: Lattice


class ModuliPicard(DomainModel):
    """Picard lattice v^⊥/ℤv of the moduli space, with the base-change data.

    perp_basis is a ℤ-basis of v^⊥ whose first vector is ±v; lifts are the
    remaining basis vectors, giving gram = liftsᵀ·total·lifts.
    divisibility is the positive generator d of v·(U ⊕ N), and |det| = |det N|/d².
    """

    vector: MukaiVector
    lattice: Lattice
    divisibility: int
    perp_basis: tuple[VectorZ, ...]
    lifts: tuple[VectorZ, ...]
    comparison: IsomorphismResult | None = None


class CorrespondenceAction(DomainModel):
    """Action of a self-correspondence: an isometry of N⊗ℚ and ±1 on T(X)."""

    on_picard: IsometryQ
    transcendental_sign: Literal[1, -1] = 1


class Letter(DomainModel):
    """Generator of a correspondence word."""

    kind: Literal["root", "tyurin"]
    vector: VectorZ
    norm: int
    integral: bool


class CorrespondenceWord(DomainModel):
    """Signed word in (−2)-root and Tyurin correspondences, last letter acting first."""

    sign: Literal[1, -1] = 1
    letters: tuple[Letter, ...] = ()
    evaluated: RationalMatrix | None = None
    assumption: str = GENERAL_CASE_ASSUMPTION


class TyurinResult(DomainModel):
    """Tyurin vector of H with the action s_H."""

    vector: MukaiVector
    action: CorrespondenceAction
    integral: bool
    coset: WalkResult | None = None


class GeneratingSet(DomainModel):
    """Letters read off the walls of a fundamental chamber."""

    letters: tuple[Letter, ...]
    complete: bool
    certificate: FundamentalPolyhedron


class AutOrders(DomainModel):
    """Orders n with φ(n) dividing rk T(X)."""

    rank_t: int = Field(..., ge=1, le=21)
    orders: tuple[int, ...]
    bound: int
