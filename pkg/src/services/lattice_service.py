"""Lattice-core service: Gram arithmetic, invariants and discriminant forms."""

from collections.abc import Sequence
from functools import lru_cache, reduce
from itertools import product
from typing import Any

import structlog
from sympy import ImmutableMatrix, Integer, Matrix, Rational, ZZ, igcd, ilcm, integer_nthroot
from sympy.matrices.normalforms import smith_normal_decomp

from src.config import get_settings
from src.exceptions import LatticeToolError
from src.schemas.common import ErrorCode, parse_rational
from src.schemas.lattice import (
    DiscriminantForm,
    IsomorphismResult,
    Lattice,
    LatticeInfo,
    Signature,
    SimilarityResult,
)

logger = structlog.get_logger()

Number = int | Rational


@lru_cache(maxsize=512)
def _gram_matrix(gram: tuple[tuple[int, ...], ...]) -> ImmutableMatrix:
    return ImmutableMatrix(gram)


def primitive_part(coords: Sequence[Number]) -> tuple[int, ...]:
    """Clear denominators and divide by the gcd, keeping the direction."""
    values = [Rational(c) for c in coords]
    denominator = reduce(ilcm, (v.q for v in values), 1)
    scaled = [int(v * denominator) for v in values]
    divisor = reduce(igcd, scaled, 0)
    if divisor == 0:
        raise LatticeToolError(ErrorCode.ZERO_VECTOR, "zero vector has no primitive part")
    return tuple(c // divisor for c in scaled)


def vector_gcd(coords: Sequence[int]) -> int:
    """Get the gcd of the coordinates (0 for the zero vector)."""
    return reduce(igcd, coords, 0)


def vector_height(coords: Sequence[int]) -> int:
    """Get the max-norm of an integer vector."""
    return max((abs(c) for c in coords), default=0)


def enumeration_key(coords: Sequence[int]) -> tuple[Any, ...]:
    """Ordering used for deterministic searches: height, first nonzero slot, coordinates."""
    first_nonzero = next((i for i, c in enumerate(coords) if c != 0), len(coords))
    return (vector_height(coords), first_nonzero, tuple(coords))


def canonical_sign(coords: Sequence[int]) -> tuple[int, ...]:
    """Choose the representative of ±x whose first nonzero coordinate is positive."""
    first = next((c for c in coords if c != 0), 0)
    return tuple(-c for c in coords) if first < 0 else tuple(coords)


class LatticeService:
    """Service for exact lattice invariants."""

    def __init__(self) -> None:
        self.settings = get_settings()

    def make_lattice(self, gram: Sequence[Sequence[Any]], name: str | None = None) -> Lattice:
        """Validate a Gram matrix and build a lattice."""
        rows = [list(row) for row in gram]
        size = len(rows)
        if size == 0 or any(len(row) != size for row in rows):
            raise LatticeToolError(ErrorCode.NOT_SQUARE, "Gram matrix must be square")

        entries: list[list[int]] = []
        for row in rows:
            converted: list[int] = []
            for entry in row:
                try:
                    value = int(entry)
                except (TypeError, ValueError):
                    value = None
                if isinstance(entry, bool) or value is None or value != entry:
                    raise LatticeToolError(
                        ErrorCode.MALFORMED_INPUT, f"Gram entry {entry!r} is not an integer"
                    )
                converted.append(value)
            entries.append(converted)

        for i in range(size):
            for j in range(i + 1, size):
                if entries[i][j] != entries[j][i]:
                    raise LatticeToolError(
                        ErrorCode.NOT_SYMMETRIC,
                        f"gram[{i}][{j}] = {entries[i][j]} but gram[{j}][{i}] = {entries[j][i]}",
                    )

        frozen = tuple(tuple(row) for row in entries)
        det = int(_gram_matrix(frozen).det())
        if det == 0:
            raise LatticeToolError(ErrorCode.DEGENERATE, "Gram matrix has determinant 0")

        return Lattice(gram=frozen, det=det, name=name)

    def gram_matrix(self, lattice: Lattice) -> ImmutableMatrix:
        """Get the Gram matrix as a sympy matrix."""
        return _gram_matrix(lattice.gram)

    def check_vector(self, lattice: Lattice, x: Sequence[Any]) -> None:
        """Raise DIMENSION_MISMATCH unless x has the lattice's rank."""
        if len(x) != lattice.rank:
            raise LatticeToolError(
                ErrorCode.DIMENSION_MISMATCH,
                f"vector of length {len(x)} used with a rank-{lattice.rank} lattice",
            )

    def inner(self, lattice: Lattice, x: Sequence[Number], y: Sequence[Number]) -> Number:
        """Compute x·y = xᵀ·gram·y exactly."""
        self.check_vector(lattice, x)
        self.check_vector(lattice, y)
        gram = lattice.gram
        total: Number = 0
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            row = gram[i]
            total += xi * sum(row[j] * yj for j, yj in enumerate(y) if yj != 0)
        return total

    def norm(self, lattice: Lattice, x: Sequence[Number]) -> Number:
        """Compute x²."""
        return self.inner(lattice, x, x)

    def orthogonal_basis(self, lattice: Lattice) -> list[tuple[Rational, ...]]:
        """Build a pairwise-orthogonal basis of L⊗ℚ made of anisotropic vectors.

        Symmetric Gaussian reduction: pivot on an anisotropic vector of the
        remaining pool, or on c_i + c_j when the pool is totally isotropic.
        """
        size = lattice.rank
        pool: list[list[Rational]] = [
            [Integer(1) if i == j else Integer(0) for j in range(size)] for i in range(size)
        ]
        basis: list[tuple[Rational, ...]] = []

        while pool:
            pivot_index = next(
                (i for i, c in enumerate(pool) if self.inner(lattice, c, c) != 0), None
            )
            if pivot_index is not None:
                pivot = pool.pop(pivot_index)
            else:
                pair = next(
                    (
                        (i, j)
                        for i in range(len(pool))
                        for j in range(i + 1, len(pool))
                        if self.inner(lattice, pool[i], pool[j]) != 0
                    ),
                    None,
                )
                if pair is None:
                    raise LatticeToolError(ErrorCode.DEGENERATE, "form is degenerate")
                i, j = pair
                pivot = [a + b for a, b in zip(pool[i], pool[j], strict=True)]
                pool.pop(j)

            pivot_norm = self.inner(lattice, pivot, pivot)
            pool = [
                [
                    ci - (self.inner(lattice, c, pivot) / pivot_norm) * pi
                    for ci, pi in zip(c, pivot, strict=True)
                ]
                for c in pool
            ]
            basis.append(tuple(Rational(p) for p in pivot))

        return basis

    def signature(self, lattice: Lattice) -> Signature:
        """Compute the exact inertia of the real form."""
        norms = [self.norm(lattice, b) for b in self.orthogonal_basis(lattice)]
        positive = sum(1 for value in norms if value > 0)
        return Signature(positive=positive, negative=len(norms) - positive)

    def is_hyperbolic(self, lattice: Lattice) -> bool:
        """Check for signature (1, rank - 1)."""
        return self.signature(lattice).is_hyperbolic()

    def is_even(self, lattice: Lattice) -> bool:
        """Check that every diagonal Gram entry is even."""
        return all(lattice.gram[i][i] % 2 == 0 for i in range(lattice.rank))

    def discriminant_form(self, lattice: Lattice) -> DiscriminantForm:
        """Compute A_L = L*/L with b_L and (for even L) q_L via Smith normal form."""
        smith, _, right = smith_normal_decomp(Matrix(lattice.gram), domain=ZZ)

        factors: list[int] = []
        generators: list[tuple[Rational, ...]] = []
        for i in range(lattice.rank):
            factor = abs(int(smith[i, i]))
            if factor > 1:
                factors.append(factor)
                generators.append(
                    tuple(Rational(int(right[k, i]), factor) for k in range(lattice.rank))
                )

        b_values = tuple(
            tuple(self.inner(lattice, g, h) % 1 for h in generators) for g in generators
        )
        q_values = None
        if self.is_even(lattice):
            q_values = tuple(self.norm(lattice, g) % 2 for g in generators)

        return DiscriminantForm(
            invariant_factors=tuple(factors),
            generators=tuple(generators),
            b_values=b_values,
            q_values=q_values,
        )

    def rescale(self, lattice: Lattice, factor: Any) -> Lattice:
        """Build L(m) by multiplying the form by a positive rational m."""
        scale = parse_rational(factor) if not isinstance(factor, Rational) else factor
        if scale <= 0:
            raise LatticeToolError(ErrorCode.INVALID_ARGUMENT, f"scale {scale} is not positive")

        rows: list[list[int]] = []
        for row in lattice.gram:
            scaled = [scale * entry for entry in row]
            if any(Rational(value).q != 1 for value in scaled):
                raise LatticeToolError(
                    ErrorCode.NON_INTEGRAL_RESCALE, f"L({scale}) is not integral"
                )
            rows.append([int(value) for value in scaled])

        name = f"{lattice.name}({scale})" if lattice.name else None
        return self.make_lattice(rows, name=name)

    def content(self, lattice: Lattice) -> int:
        """Get the gcd of all Gram entries."""
        return reduce(igcd, (entry for row in lattice.gram for entry in row), 0)

    def is_primitive(self, lattice: Lattice, x: Sequence[int]) -> bool:
        """Check that x is a primitive lattice vector."""
        self.check_vector(lattice, x)
        divisor = vector_gcd(x)
        if divisor == 0:
            raise LatticeToolError(ErrorCode.ZERO_VECTOR, "zero vector")
        return divisor == 1

    def direct_sum(self, first: Lattice, second: Lattice) -> Lattice:
        """Build the orthogonal direct sum (block-diagonal Gram)."""
        size = first.rank + second.rank
        rows = [[0] * size for _ in range(size)]
        for i, row in enumerate(first.gram):
            for j, entry in enumerate(row):
                rows[i][j] = entry
        offset = first.rank
        for i, row in enumerate(second.gram):
            for j, entry in enumerate(row):
                rows[offset + i][offset + j] = entry

        name = None
        if first.name and second.name:
            name = f"{first.name}+{second.name}"
        return self.make_lattice(rows, name=name)

    def vectors_of_norm(self, lattice: Lattice, target: int, height_bound: int) -> list[tuple[int, ...]]:
        """List all vectors x with x² = target and max|x_i| <= height_bound.

        The last coordinate is solved from the quadratic equation, the others are
        enumerated. Sorted by enumeration_key.
        """
        size = lattice.rank
        gram = lattice.gram
        last = size - 1
        c = gram[last][last]
        found: list[tuple[int, ...]] = []

        for head in product(range(-height_bound, height_bound + 1), repeat=last):
            linear = sum(gram[i][last] * head[i] for i in range(last))
            quadratic = sum(
                head[i] * gram[i][j] * head[j] for i in range(last) for j in range(last)
            )
            # c z² + 2·linear·z + (quadratic - target) = 0
            constant = quadratic - target
            candidates: list[int] = []
            if c != 0:
                discriminant = linear * linear - c * constant
                if discriminant < 0:
                    continue
                root, exact = integer_nthroot(discriminant, 2)
                if not exact:
                    continue
                for numerator in {-linear + int(root), -linear - int(root)}:
                    if numerator % c == 0:
                        candidates.append(numerator // c)
            elif linear != 0:
                if (-constant) % (2 * linear) == 0:
                    candidates.append(-constant // (2 * linear))
            elif constant == 0:
                candidates.extend(range(-height_bound, height_bound + 1))

            for z in candidates:
                if abs(z) <= height_bound:
                    found.append((*head, z))

        found.sort(key=enumeration_key)
        return found

    def isomorphic_small(
        self, first: Lattice, second: Lattice, height_bound: int | None = None
    ) -> IsomorphismResult:
        """Search for T with Tᵀ·gram(first)·T = gram(second), entries bounded by height_bound."""
        bound = height_bound if height_bound is not None else self.settings.isomorphism_height_bound

        if first.rank != second.rank:
            return IsomorphismResult(status="rejected", reason="rank differs", height_bound=bound)
        if first.det != second.det:
            return IsomorphismResult(
                status="rejected", reason="determinant differs", height_bound=bound
            )
        if self.is_even(first) != self.is_even(second):
            return IsomorphismResult(status="rejected", reason="parity differs", height_bound=bound)
        if self.signature(first) != self.signature(second):
            return IsomorphismResult(
                status="rejected", reason="signature differs", height_bound=bound
            )

        size = first.rank
        target = second.gram
        candidates: dict[int, list[tuple[int, ...]]] = {}
        for j in range(size):
            norm = target[j][j]
            if norm not in candidates:
                candidates[norm] = self.vectors_of_norm(first, norm, bound)

        def extend(columns: list[tuple[int, ...]]) -> list[tuple[int, ...]] | None:
            j = len(columns)
            if j == size:
                return columns
            for candidate in candidates[target[j][j]]:
                if all(
                    self.inner(first, columns[i], candidate) == target[i][j] for i in range(j)
                ):
                    result = extend([*columns, candidate])
                    if result is not None:
                        return result
            return None

        columns = extend([])
        if columns is None:
            logger.debug("Isomorphism search exhausted", rank=size, height_bound=bound)
            return IsomorphismResult(status="not_found_within_bound", height_bound=bound)

        witness = tuple(tuple(columns[j][i] for j in range(size)) for i in range(size))
        return IsomorphismResult(status="found", witness=witness, height_bound=bound)

    def is_similar(
        self, first: Lattice, second: Lattice, height_bound: int | None = None
    ) -> SimilarityResult:
        """Decide whether second ≅ first(m) for some positive rational m.

        The content (gcd of Gram entries) scales exactly by m, so m is forced.
        """
        if first.rank != second.rank:
            return SimilarityResult(similar=False)
        if self.signature(first) != self.signature(second):
            return SimilarityResult(similar=False)

        scale = Rational(self.content(second), self.content(first))
        scaled = self.rescale(first, scale)
        isomorphism = self.isomorphic_small(scaled, second, height_bound)
        verdicts = {"found": True, "rejected": False, "not_found_within_bound": None}
        return SimilarityResult(
            similar=verdicts[isomorphism.status], scale=scale, isomorphism=isomorphism
        )

    def info(self, lattice: Lattice) -> LatticeInfo:
        """Summarize a lattice's invariants."""
        signature = self.signature(lattice)
        return LatticeInfo(
            name=lattice.name,
            gram=[list(row) for row in lattice.gram],
            rank=lattice.rank,
            det=lattice.det,
            signature=signature,
            even=self.is_even(lattice),
            hyperbolic=signature.is_hyperbolic(),
            unimodular=abs(lattice.det) == 1,
        )


# Singleton instance
_lattice_service: LatticeService | None = None


def get_lattice_service() -> LatticeService:
    """Get lattice service instance."""
    global _lattice_service
    if _lattice_service is None:
        _lattice_service = LatticeService()
    return _lattice_service
