"""Reflectivity schemas."""

from typing import Literal

from pydantic import Field

from src.schemas.common import DomainModel, RationalValue, VectorQ, VectorZ
from src.schemas.reflection import IsometryQ, ReflectionWord, Root

VINBERG_CONVENTION = "vinberg:walls-nonpositive-on-chamber;accept-if-nonnegative-pairing"
PRIORITY_CONVENTION = "priority:(d.v0)^2/|d^2|;ties-lex"
REFLECTIVITY_ASSUMPTION = "finite-volume-chamber-implies-reflective"


class Budget(DomainModel):
    """Vinberg run limits."""

    max_walls: int = Field(..., ge=0)
    max_priority: RationalValue


class Vertex(DomainModel):
    """Extreme ray of the chamber cone."""

    ray: VectorZ
    walls: tuple[int, ...]
    kind: Literal["Interior", "Ideal"]


class FundamentalPolyhedron(DomainModel):
    """Chamber {x : x·δ <= 0 for every wall δ} containing the controlling vector."""

    controlling_vector: VectorZ
    tie_break: VectorZ | None = None
    norm_set: tuple[int, ...]
    walls: tuple[Root, ...]
    vertices: tuple[Vertex, ...] = ()
    status: Literal["FiniteVolume", "Partial"]
    convention: str = VINBERG_CONVENTION


class BudgetReport(DomainModel):
    """Counters describing where a bounded search stopped."""

    roots_enumerated: int
    priority_reached: RationalValue
    walls_kept: int
    reason: str


class Rank2Verdict(DomainModel):
    """Outcome of the rank-2 reflectivity criterion."""

    reflective: bool | None
    reason: Literal["IsotropicVector", "NegativeRoot", "NoWitness"]
    witness: VectorZ | None = None
    isotropic: bool
    height_bound: int


class ReflectivityVerdict(DomainModel):
    """Reflective with a certificate, or Indeterminate with a budget report."""

    verdict: Literal["Reflective", "Indeterminate"]
    method: Literal["rank1", "rank2", "vinberg"]
    certificate: FundamentalPolyhedron | None = None
    rank2: Rank2Verdict | None = None
    budget_report: BudgetReport | None = None
    assumption: str = REFLECTIVITY_ASSUMPTION


class WalkResult(DomainModel):
    """W^(−2) reduction: evaluate_word(word) ∘ f = reduced."""

    word: ReflectionWord
    reduced: IsometryQ
    interior_point: VectorQ
    steps: int
    budget_exceeded: bool = False


class RootList(DomainModel):
    """Negative roots up to a priority bound."""

    controlling_vector: VectorQ
    max_priority: RationalValue
    norm_set: tuple[int, ...]
    roots: tuple[Root, ...]
