"""Root enumeration ordered by Vinberg priority."""

from collections.abc import Iterable, Sequence
from typing import Any

import structlog
from sympy import Matrix, Rational, divisors, integer_nthroot

from src.exceptions import LatticeToolError
from src.schemas.common import ErrorCode
from src.schemas.lattice import Lattice
from src.schemas.reflection import Root
from src.services.lattice_service import (
    LatticeService,
    canonical_sign,
    get_lattice_service,
    vector_gcd,
)
from src.services.reflection_service import ReflectionService, get_reflection_service

logger = structlog.get_logger()


def _floor(value: Rational) -> int:
    value = Rational(value)
    return int(value.p // value.q)


def _ceil(value: Rational) -> int:
    return -_floor(-Rational(value))


class EnumerationService:
    """Fincke–Pohst style enumeration of negative roots around a controlling vector."""

    def __init__(self) -> None:
        self.lattices: LatticeService = get_lattice_service()
        self.reflections: ReflectionService = get_reflection_service()

    def check_hyperbolic(self, lattice: Lattice) -> None:
        """Raise NOT_HYPERBOLIC unless the signature is (1, rank - 1)."""
        if not self.lattices.is_hyperbolic(lattice):
            signature = self.lattices.signature(lattice)
            raise LatticeToolError(
                ErrorCode.NOT_HYPERBOLIC,
                f"signature ({signature.positive},{signature.negative}) is not hyperbolic",
            )

    def check_controller(self, lattice: Lattice, controller: Sequence[Any]) -> Rational:
        """Return v0² and raise BAD_CONTROLLER unless it is positive."""
        self.lattices.check_vector(lattice, controller)
        norm = Rational(self.lattices.norm(lattice, [Rational(c) for c in controller]))
        if norm <= 0:
            raise LatticeToolError(
                ErrorCode.BAD_CONTROLLER, f"controlling vector has square {norm} <= 0"
            )
        return norm

    def default_norms(self, lattice: Lattice) -> list[int]:
        """Get the candidate root norms: negative divisors of 2|det L|, even ones for even L."""
        even = self.lattices.is_even(lattice)
        return sorted(
            (-d for d in divisors(2 * abs(lattice.det)) if not even or d % 2 == 0),
            reverse=True,
        )

    def short_vectors(self, form: Matrix, bound: Rational) -> list[tuple[int, ...]]:
        """List the nonzero integer x with xᵀ·form·x <= bound for a positive definite form.

        Coordinates are fixed from the last one down using the LDLᵀ
        decomposition; integer ranges are widened and each step is checked exactly.
        """
        size = form.rows
        lower, diagonal = form.LDLdecomposition()
        weights = [Rational(diagonal[i, i]) for i in range(size)]
        coords = [0] * size
        found: list[tuple[int, ...]] = []

        def descend(i: int, remaining: Rational) -> None:
            center = sum((Rational(lower[j, i]) * coords[j] for j in range(i + 1, size)), Rational(0))
            radius_sq = remaining / weights[i]
            reach = int(integer_nthroot(_ceil(radius_sq), 2)[0]) + 1
            middle = _floor(-center)
            for x in range(middle - reach, middle + reach + 2):
                shifted = x + center
                used = weights[i] * shifted * shifted
                if used > remaining:
                    continue
                coords[i] = x
                if i == 0:
                    if any(coords):
                        found.append(tuple(coords))
                else:
                    descend(i - 1, remaining - used)
            coords[i] = 0

        if bound >= 0:
            descend(size - 1, Rational(bound))
        return found

    def majorant(self, lattice: Lattice, controller: Sequence[Any]) -> Matrix:
        """Build the positive definite form 2(x·v0)²/v0² − x² of a hyperbolic lattice."""
        gram = Matrix(self.lattices.gram_matrix(lattice))
        column = gram * Matrix([Rational(c) for c in controller])
        norm = self.check_controller(lattice, controller)
        return 2 * column * column.T / norm - gram

    def enumerate_roots(
        self,
        lattice: Lattice,
        controller: Sequence[Any],
        max_priority: Any,
        allowed_norms: Iterable[int] | None = None,
    ) -> list[Root]:
        """Enumerate negative roots δ with (δ·v0)²/|δ²| <= max_priority.

        Roots are signed so that δ·v0 <= 0 (first nonzero coordinate positive
        when δ·v0 = 0) and sorted by priority, then lexicographically.
        """
        self.check_hyperbolic(lattice)
        v0_norm = self.check_controller(lattice, controller)
        limit = Rational(max_priority)
        if limit < 0:
            return []

        if allowed_norms is None:
            norms = self.default_norms(lattice)
        else:
            norms = sorted(set(allowed_norms), reverse=True)
            if any(n >= 0 for n in norms):
                raise LatticeToolError(ErrorCode.INVALID_ARGUMENT, "root norms must be negative")
        if not norms:
            return []

        largest = max(-n for n in norms)
        # Q(δ) = 2(δ·v0)²/v0² + |δ²| for roots
        bound = largest * (2 * limit / v0_norm + 1)
        vectors = self.short_vectors(self.majorant(lattice, controller), bound)

        rational_controller = [Rational(c) for c in controller]
        allowed = set(norms)
        roots: dict[tuple[int, ...], Root] = {}
        for vector in vectors:
            norm = int(self.lattices.norm(lattice, vector))
            if norm not in allowed:
                continue
            pairing = Rational(self.lattices.inner(lattice, vector, rational_controller))
            priority = pairing * pairing / -norm
            if priority > limit:
                continue
            if pairing > 0:
                vector = tuple(-c for c in vector)
            elif pairing == 0:
                vector = canonical_sign(vector)
            if vector in roots:
                continue
            if vector_gcd(vector) != 1 or not self.reflections.is_root(lattice, vector):
                continue
            roots[vector] = Root(vector=vector, norm=norm, priority=priority)

        ordered = sorted(roots.values(), key=lambda r: (r.priority, r.vector))
        logger.debug(
            "Roots enumerated",
            rank=lattice.rank,
            max_priority=str(limit),
            candidates=len(vectors),
            roots=len(ordered),
        )
        return ordered


# Singleton instance
_enumeration_service: EnumerationService | None = None


def get_enumeration_service() -> EnumerationService:
    """Get enumeration service instance."""
    global _enumeration_service
    if _enumeration_service is None:
        _enumeration_service = EnumerationService()
    return _enumeration_service
