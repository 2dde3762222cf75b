"""Mukai correspondence service."""

from collections.abc import Sequence

import structlog
from sympy import Matrix, ZZ, totient
from sympy.matrices.normalforms import smith_normal_decomp

from src.exceptions import LatticeToolError
from src.schemas.common import ErrorCode
from src.schemas.lattice import Lattice
from src.schemas.mukai import (
    AlgebraicMukaiLattice,
    AutOrders,
    CorrespondenceAction,
    CorrespondenceWord,
    GeneratingSet,
    Letter,
    ModuliPicard,
    MukaiVector,
    TyurinResult,
)
from src.schemas.vinberg import Budget, WalkResult
from src.services.lattice_service import LatticeService, get_lattice_service, vector_gcd
from src.services.reflection_service import ReflectionService, get_reflection_service
from src.services.vinberg_service import VinbergService, get_vinberg_service

logger = structlog.get_logger()


class MukaiService:
    """Service for Mukai vectors, moduli Picard lattices and correspondence words."""

    def __init__(self) -> None:
        self.lattices: LatticeService = get_lattice_service()
        self.reflections: ReflectionService = get_reflection_service()
        self.vinberg: VinbergService = get_vinberg_service()

    def algebraic_mukai_lattice(self, picard: Lattice) -> AlgebraicMukaiLattice:
        """Build U ⊕ N in the (r, N, s) basis."""
        size = picard.rank + 2
        rows = [[0] * size for _ in range(size)]
        rows[0][size - 1] = rows[size - 1][0] = -1
        for i, row in enumerate(picard.gram):
            for j, entry in enumerate(row):
                rows[i + 1][j + 1] = entry
        name = f"U+{picard.name}" if picard.name else None
        return AlgebraicMukaiLattice(
            picard=picard, total=self.lattices.make_lattice(rows, name=name)
        )

    def _check_vector(self, mukai: AlgebraicMukaiLattice, vector: MukaiVector) -> None:
        self.lattices.check_vector(mukai.picard, vector.H)

    def mukai_square(self, mukai: AlgebraicMukaiLattice, vector: MukaiVector) -> int:
        """Compute v² = H² − 2rs."""
        self._check_vector(mukai, vector)
        return int(self.lattices.norm(mukai.picard, vector.H)) - 2 * vector.r * vector.s

    def is_admissible(self, mukai: AlgebraicMukaiLattice, vector: MukaiVector) -> bool:
        """Check r >= 1, primitivity and H² = 2rs."""
        self._check_vector(mukai, vector)
        return (
            vector.r >= 1
            and vector_gcd(vector.coordinates()) == 1
            and self.mukai_square(mukai, vector) == 0
        )

    def divisibility(self, mukai: AlgebraicMukaiLattice, vector: MukaiVector) -> int:
        """Get d with v·(U ⊕ N) = dℤ."""
        self._check_vector(mukai, vector)
        total = Matrix(self.lattices.gram_matrix(mukai.total))
        row = Matrix(vector.coordinates()).T * total
        return vector_gcd([int(c) for c in row])

    def moduli_picard(
        self,
        mukai: AlgebraicMukaiLattice,
        vector: MukaiVector,
        require_rank: bool = True,
    ) -> ModuliPicard:
        """Compute v^⊥/ℤv with an explicit basis of v^⊥ and lifts of the quotient basis.

        With require_rank=False only primitivity and isotropy are required, so
        vectors such as (0, 0, 1) can be used for sanity checks.
        """
        self._check_vector(mukai, vector)
        primitive_isotropic = (
            vector_gcd(vector.coordinates()) == 1 and self.mukai_square(mukai, vector) == 0
        )
        if not primitive_isotropic or (require_rank and vector.r < 1):
            raise LatticeToolError(
                ErrorCode.NOT_ADMISSIBLE,
                f"({vector.r}; {','.join(map(str, vector.H))}; {vector.s}) is not admissible",
            )

        total = Matrix(self.lattices.gram_matrix(mukai.total))
        v = Matrix(vector.coordinates())
        size = total.rows

        # kernel of x ↦ v·x: the last columns of the right SNF transform
        _, _, right = smith_normal_decomp((v.T * total), domain=ZZ)
        kernel = right[:, 1:]
        coords = (right.inv() * v)[1:, :]

        # complete the primitive vector coords to a unimodular basis
        _, left, _ = smith_normal_decomp(coords, domain=ZZ)
        completion = left.inv()
        basis = kernel * completion
        lifts = basis[:, 1:]
        gram = lifts.T * total * lifts

        lattice = self.lattices.make_lattice(
            [[int(gram[i, j]) for j in range(size - 2)] for i in range(size - 2)],
            name=f"M({vector.r};{','.join(map(str, vector.H))};{vector.s})",
        )
        divisibility = self.divisibility(mukai, vector)
        logger.debug(
            "Moduli Picard lattice computed",
            det=lattice.det,
            rank=lattice.rank,
            divisibility=divisibility,
        )

        def columns(matrix: Matrix) -> tuple[tuple[int, ...], ...]:
            return tuple(
                tuple(int(matrix[i, j]) for i in range(matrix.rows)) for j in range(matrix.cols)
            )

        return ModuliPicard(
            vector=vector,
            lattice=lattice,
            divisibility=divisibility,
            perp_basis=columns(basis),
            lifts=columns(lifts),
        )

    def tyurin_vector(
        self, mukai: AlgebraicMukaiLattice, mirror: Sequence[int], sign: int
    ) -> MukaiVector:
        """Build v = (sign·H²/2, H, sign) for sign·H² > 0."""
        self.lattices.check_vector(mukai.picard, mirror)
        if sign not in (1, -1):
            raise LatticeToolError(ErrorCode.INVALID_ARGUMENT, "sign must be 1 or -1")
        if not any(mirror):
            raise LatticeToolError(ErrorCode.ZERO_VECTOR, "zero vector")
        norm = int(self.lattices.norm(mukai.picard, mirror))
        if sign * norm <= 0:
            raise LatticeToolError(ErrorCode.WRONG_SIGN, f"sign {sign} with H² = {norm}")
        if norm % 2:
            raise LatticeToolError(ErrorCode.ODD_NORM, f"H² = {norm} is odd")
        return MukaiVector(r=sign * norm // 2, H=tuple(mirror), s=sign)

    def tyurin_action(self, picard: Lattice, mirror: Sequence[int]) -> CorrespondenceAction:
        """Get the action s_H of Tyu(H), trivial on T(X)."""
        return CorrespondenceAction(
            on_picard=self.reflections.reflection(picard, mirror), transcendental_sign=1
        )

    def has_integral_tyurin_action(self, picard: Lattice, mirror: Sequence[int]) -> bool:
        """Check 2(H·N)H/H² ⊂ N."""
        action = self.reflections.reflection(picard, mirror)
        return self.reflections.is_integral(picard, action)

    def tyurin(
        self,
        mukai: AlgebraicMukaiLattice,
        mirror: Sequence[int],
        sign: int,
        point: Sequence[int] | None = None,
        reduce: bool = False,
    ) -> TyurinResult:
        """Bundle the Tyurin vector, its action and (optionally) its W^(−2)-coset walk."""
        vector = self.tyurin_vector(mukai, mirror, sign)
        action = self.tyurin_action(mukai.picard, mirror)
        integral = self.has_integral_tyurin_action(mukai.picard, mirror)
        coset = None
        if reduce:
            coset = self.tyurin_coset_representative(mukai.picard, mirror, point)
        return TyurinResult(vector=vector, action=action, integral=integral, coset=coset)

    def tyurin_coset_representative(
        self, picard: Lattice, mirror: Sequence[int], point: Sequence[int] | None = None
    ) -> WalkResult:
        """Reduce s_H modulo W^(−2) by chamber walking."""
        action = self.tyurin_action(picard, mirror)
        return self.vinberg.reduce_mod_w2(picard, action.on_picard, point)

    def letter(self, picard: Lattice, mirror: Sequence[int]) -> Letter:
        """Classify a mirror as a (−2)-root letter or a Tyurin letter."""
        norm = int(self.lattices.norm(picard, mirror))
        if norm == -2 and self.reflections.is_root(picard, mirror):
            return Letter(kind="root", vector=tuple(mirror), norm=norm, integral=True)
        return Letter(
            kind="tyurin",
            vector=tuple(mirror),
            norm=norm,
            integral=self.has_integral_tyurin_action(picard, mirror),
        )

    def evaluate_correspondence(
        self, picard: Lattice, word: CorrespondenceWord
    ) -> CorrespondenceAction:
        """Multiply out sign · s_{letters[0]} ⋯ s_{letters[-1]}."""
        result = self.reflections.identity(picard)
        for letter in word.letters:
            result = self.reflections.compose(
                result, self.reflections.reflection(picard, letter.vector)
            )
        if word.sign == -1:
            result = self.reflections.negate(result)
        return CorrespondenceAction(on_picard=result, transcendental_sign=word.sign)

    def decompose_correspondence(
        self, picard: Lattice, action: CorrespondenceAction
    ) -> CorrespondenceWord:
        """Write a correspondence action as ± a word in (−2)-root and Tyurin letters."""
        sign = action.transcendental_sign
        normalized = action.on_picard
        if sign == -1:
            normalized = self.reflections.negate(normalized)

        word = self.reflections.decompose_isometry(picard, normalized)
        letters = tuple(self.letter(picard, mirror) for mirror in word.mirrors)
        result = CorrespondenceWord(sign=sign, letters=letters)

        evaluated = self.evaluate_correspondence(picard, result)
        if evaluated.on_picard.matrix != action.on_picard.matrix:
            raise LatticeToolError(ErrorCode.INTERNAL_ERROR, "correspondence word does not replay")
        logger.debug(
            "Correspondence decomposed",
            letters=len(letters),
            roots=sum(1 for letter in letters if letter.kind == "root"),
        )
        return result.model_copy(update={"evaluated": evaluated.on_picard.matrix})

    def numerically_equivalent(
        self,
        first: CorrespondenceAction,
        second: CorrespondenceAction,
        up_to_sign: bool = False,
    ) -> bool:
        """Compare induced actions on cohomology (optionally up to ±1)."""
        if first.on_picard.ambient.gram != second.on_picard.ambient.gram:
            raise LatticeToolError(
                ErrorCode.AMBIENT_MISMATCH, "actions belong to different Picard lattices"
            )
        same = (
            first.on_picard.matrix == second.on_picard.matrix
            and first.transcendental_sign == second.transcendental_sign
        )
        if same or not up_to_sign:
            return bool(same)
        return bool(
            first.on_picard.matrix == -second.on_picard.matrix
            and first.transcendental_sign == -second.transcendental_sign
        )

    def generating_correspondences(
        self, picard: Lattice, budget: Budget | None = None
    ) -> GeneratingSet:
        """Read generating letters of {±1}W(N) off the walls of a fundamental chamber."""
        polyhedron = self.vinberg.vinberg_run(picard, budget=budget)
        letters = tuple(self.letter(picard, wall.vector) for wall in polyhedron.walls)
        return GeneratingSet(
            letters=letters,
            complete=polyhedron.status == "FiniteVolume",
            certificate=polyhedron,
        )

    def aut_orders_transcendental(self, rank_t: int) -> AutOrders:
        """List all n with φ(n) | rk T(X), searching n <= 2·rk² + 2."""
        if not 1 <= rank_t <= 21:
            raise LatticeToolError(ErrorCode.OUT_OF_RANGE, f"rk T = {rank_t} is outside 1..21")
        bound = 2 * rank_t * rank_t + 2
        orders = tuple(n for n in range(1, bound + 1) if rank_t % int(totient(n)) == 0)
        return AutOrders(rank_t=rank_t, orders=orders, bound=bound)


# Singleton instance
_mukai_service: MukaiService | None = None


def get_mukai_service() -> MukaiService:
    """Get Mukai service instance."""
    global _mukai_service
    if _mukai_service is None:
        _mukai_service = MukaiService()
    return _mukai_service
