"""Reflection-algebra service: roots, reflections and Cartan–Dieudonné words."""

from collections.abc import Sequence
from typing import Any

import structlog
from sympy import ImmutableMatrix, Matrix, Rational, eye

from src.exceptions import LatticeToolError
from src.schemas.common import ErrorCode, parse_rational
from src.schemas.lattice import Lattice
from src.schemas.reflection import IsometryQ, ReflectionClass, ReflectionWord
from src.services.lattice_service import (
    LatticeService,
    canonical_sign,
    get_lattice_service,
    primitive_part,
)

logger = structlog.get_logger()


class ReflectionService:
    """Service for reflections and rational isometries."""

    def __init__(self) -> None:
        self.lattices: LatticeService = get_lattice_service()

    def _rational_vector(self, lattice: Lattice, vector: Sequence[Any]) -> list[Rational]:
        self.lattices.check_vector(lattice, vector)
        coords = [parse_rational(c) if not isinstance(c, Rational) else c for c in vector]
        if all(c == 0 for c in coords):
            raise LatticeToolError(ErrorCode.ZERO_VECTOR, "zero vector")
        return coords

    def _check_ambient(self, first: IsometryQ, second: IsometryQ) -> None:
        if first.ambient.gram != second.ambient.gram:
            raise LatticeToolError(
                ErrorCode.AMBIENT_MISMATCH, "isometries act on different lattices"
            )

    def is_root(self, lattice: Lattice, vector: Sequence[int]) -> bool:
        """Check δ² ≠ 0 and δ² | 2(δ·e_i) for every basis vector e_i."""
        self.lattices.check_vector(lattice, vector)
        if all(c == 0 for c in vector):
            raise LatticeToolError(ErrorCode.ZERO_VECTOR, "zero vector")
        norm = self.lattices.norm(lattice, vector)
        if norm == 0:
            return False
        for row in lattice.gram:
            pairing = sum(entry * c for entry, c in zip(row, vector, strict=True))
            if (2 * pairing) % norm != 0:
                return False
        return True

    def identity(self, lattice: Lattice) -> IsometryQ:
        """Get the identity isometry."""
        return IsometryQ(matrix=ImmutableMatrix(eye(lattice.rank)), ambient=lattice)

    def is_isometry(self, lattice: Lattice, matrix: ImmutableMatrix) -> bool:
        """Check matrixᵀ·gram·matrix = gram exactly."""
        gram = self.lattices.gram_matrix(lattice)
        return bool(matrix.T * gram * matrix == gram)

    def make_isometry(self, lattice: Lattice, rows: Any) -> IsometryQ:
        """Validate a rational matrix as an isometry of L⊗ℚ."""
        try:
            matrix = ImmutableMatrix(
                [[parse_rational(entry) for entry in row] for row in rows]
            )
        except (TypeError, ValueError) as e:
            raise LatticeToolError(ErrorCode.MALFORMED_INPUT, f"bad matrix: {e}") from e
        if matrix.shape != (lattice.rank, lattice.rank):
            raise LatticeToolError(
                ErrorCode.DIMENSION_MISMATCH,
                f"matrix of shape {matrix.shape} used with a rank-{lattice.rank} lattice",
            )
        if not self.is_isometry(lattice, matrix):
            raise LatticeToolError(ErrorCode.NOT_ISOMETRY, "matrix does not preserve the form")
        return IsometryQ(matrix=matrix, ambient=lattice)

    def reflection(self, lattice: Lattice, mirror: Sequence[Any]) -> IsometryQ:
        """Build s_H: x ↦ x − 2(x·H)H/H²."""
        coords = self._rational_vector(lattice, mirror)
        norm = self.lattices.norm(lattice, coords)
        if norm == 0:
            raise LatticeToolError(
                ErrorCode.ISOTROPIC_MIRROR, f"mirror {list(map(str, coords))} is isotropic"
            )
        column = Matrix(coords)
        gram = self.lattices.gram_matrix(lattice)
        matrix = eye(lattice.rank) - (2 / Rational(norm)) * column * (column.T * gram)
        return IsometryQ(matrix=ImmutableMatrix(matrix), ambient=lattice)

    def is_integral(self, lattice: Lattice, isometry: IsometryQ) -> bool:
        """Check that the isometry has integer entries (so lies in O(L))."""
        if isometry.ambient.gram != lattice.gram:
            raise LatticeToolError(
                ErrorCode.AMBIENT_MISMATCH, "isometry belongs to another lattice"
            )
        return all(Rational(entry).q == 1 for entry in isometry.matrix)

    def compose(self, first: IsometryQ, second: IsometryQ) -> IsometryQ:
        """Compose first ∘ second (second acts first)."""
        self._check_ambient(first, second)
        return IsometryQ(matrix=first.matrix * second.matrix, ambient=first.ambient)

    def invert(self, isometry: IsometryQ) -> IsometryQ:
        """Get the inverse isometry."""
        return IsometryQ(matrix=isometry.matrix.inv(), ambient=isometry.ambient)

    def negate(self, isometry: IsometryQ) -> IsometryQ:
        """Get −f."""
        return IsometryQ(matrix=-isometry.matrix, ambient=isometry.ambient)

    def apply(self, isometry: IsometryQ, vector: Sequence[Any]) -> tuple[Rational, ...]:
        """Apply the isometry to a vector."""
        self.lattices.check_vector(isometry.ambient, vector)
        image = isometry.matrix * Matrix([Rational(c) for c in vector])
        return tuple(Rational(c) for c in image)

    def decompose_isometry(self, lattice: Lattice, isometry: IsometryQ) -> ReflectionWord:
        """Write f as a product of at most 2·rank reflections (Cartan–Dieudonné over ℚ).

        Works along an orthogonal anisotropic basis b_i, reflecting the current
        image u of b_i back onto b_i, so later reflections fix earlier b_j.
        """
        if isometry.ambient.gram != lattice.gram:
            raise LatticeToolError(
                ErrorCode.AMBIENT_MISMATCH, "isometry belongs to another lattice"
            )
        if not self.is_isometry(lattice, isometry.matrix):
            raise LatticeToolError(ErrorCode.NOT_ISOMETRY, "matrix does not preserve the form")

        current = isometry
        found: list[tuple[int, ...]] = []
        for basis_vector in self.lattices.orthogonal_basis(lattice):
            image = self.apply(current, basis_vector)
            if image == basis_vector:
                continue

            difference = [u - b for u, b in zip(image, basis_vector, strict=True)]
            if self.lattices.norm(lattice, difference) != 0:
                steps = [difference]
            else:
                # (u−b)² + (u+b)² = 4b² ≠ 0
                steps = [[u + b for u, b in zip(image, basis_vector, strict=True)], list(basis_vector)]

            for step in steps:
                mirror = canonical_sign(primitive_part(step))
                current = self.compose(self.reflection(lattice, mirror), current)
                found.append(mirror)

        if current.matrix != eye(lattice.rank):
            raise LatticeToolError(ErrorCode.INTERNAL_ERROR, "reflection walk did not close")

        logger.debug("Isometry decomposed", rank=lattice.rank, length=len(found))
        # s_k ⋯ s_1 ∘ f = 1, so f = s_1 ⋯ s_k written left to right
        return ReflectionWord(sign=1, mirrors=tuple(found))

    def evaluate_word(self, lattice: Lattice, word: ReflectionWord) -> IsometryQ:
        """Multiply out sign · s_{mirrors[0]} ⋯ s_{mirrors[-1]}."""
        result = self.identity(lattice)
        for mirror in word.mirrors:
            result = self.compose(result, self.reflection(lattice, mirror))
        if word.sign == -1:
            result = self.negate(result)
        return result

    def classify_reflection(self, lattice: Lattice, mirror: Sequence[Any]) -> ReflectionClass:
        """Classify s_H as positive (H² > 0) or negative (H² < 0) and test integrality."""
        isometry = self.reflection(lattice, mirror)
        primitive = primitive_part(mirror)
        norm = int(self.lattices.norm(lattice, primitive))
        return ReflectionClass(
            mirror=primitive,
            norm=norm,
            kind="positive" if norm > 0 else "negative",
            integral=self.is_integral(lattice, isometry),
        )


# Singleton instance
_reflection_service: ReflectionService | None = None


def get_reflection_service() -> ReflectionService:
    """Get reflection service instance."""
    global _reflection_service
    if _reflection_service is None:
        _reflection_service = ReflectionService()
    return _reflection_service
