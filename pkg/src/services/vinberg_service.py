"""Vinberg reflectivity service: rank-1/2 criteria, fundamental chambers and W^(−2) walks."""

from collections.abc import Sequence
from itertools import combinations, product
from typing import Any

import structlog
from sympy import Matrix, Rational, divisors, integer_nthroot

from src.config import get_settings
from src.exceptions import LatticeToolError
from src.schemas.common import ErrorCode
from src.schemas.lattice import Lattice
from src.schemas.reflection import IsometryQ, ReflectionWord, Root
from src.schemas.vinberg import (
    Budget,
    BudgetReport,
    FundamentalPolyhedron,
    Rank2Verdict,
    ReflectivityVerdict,
    Vertex,
    WalkResult,
)
from src.services.enumeration_service import EnumerationService, get_enumeration_service
from src.services.lattice_service import (
    LatticeService,
    canonical_sign,
    enumeration_key,
    get_lattice_service,
    primitive_part,
    vector_gcd,
    vector_height,
)
from src.services.reflection_service import ReflectionService, get_reflection_service

logger = structlog.get_logger()

MAX_CERTIFIED_RANK = 4


def witness_key(vector: Sequence[int]) -> tuple[Any, ...]:
    """Order rank-2 witnesses: height, support size, first nonzero slot, coordinates."""
    support = sum(1 for c in vector if c != 0)
    return (vector_height(vector), support, *enumeration_key(vector)[1:])


class VinbergService:
    """Service for reflectivity of hyperbolic lattices."""

    def __init__(self) -> None:
        self.settings = get_settings()
        self.lattices: LatticeService = get_lattice_service()
        self.reflections: ReflectionService = get_reflection_service()
        self.enumeration: EnumerationService = get_enumeration_service()

    def default_budget(self) -> Budget:
        """Get the configured Vinberg budget."""
        return Budget(
            max_walls=self.settings.vinberg_max_walls,
            max_priority=self.settings.vinberg_priority_bound,
        )

    def rank1_is_reflective(self, lattice: Lattice) -> bool:
        """Rank-1 hyperbolic lattices are reflective since O(L) = {±1}."""
        if lattice.rank != 1:
            raise LatticeToolError(ErrorCode.WRONG_RANK, f"expected rank 1, got {lattice.rank}")
        self.enumeration.check_hyperbolic(lattice)
        return True

    def _isotropic_directions(self, a: int, b: int, c: int, root: int) -> list[tuple[int, ...]]:
        if a != 0:
            raw = [(-b + root, a), (-b - root, a)]
        else:
            raw = [(1, 0), (c, -2 * b)]
        return sorted({canonical_sign(primitive_part(v)) for v in raw}, key=witness_key)

    def _negative_roots(self, lattice: Lattice, height_bound: int) -> list[tuple[int, ...]]:
        (a, b), (_, c) = lattice.gram
        even = self.lattices.is_even(lattice)
        found: set[tuple[int, ...]] = set()
        for k in divisors(2 * abs(lattice.det)):
            if even and k % 2:
                continue
            for x in range(-height_bound, height_bound + 1):
                # c y² + 2bx·y + (a x² + k) = 0
                constant = a * x * x + k
                ys: list[int] = []
                if c != 0:
                    discriminant = b * b * x * x - c * constant
                    if discriminant < 0:
                        continue
                    root, exact = integer_nthroot(discriminant, 2)
                    if not exact:
                        continue
                    ys = [(-b * x + s) // c for s in {int(root), -int(root)} if (-b * x + s) % c == 0]
                elif b * x != 0 and constant % (2 * b * x) == 0:
                    ys = [-constant // (2 * b * x)]
                for y in ys:
                    vector = (x, y)
                    if abs(y) > height_bound or vector_gcd(vector) != 1:
                        continue
                    if self.reflections.is_root(lattice, vector):
                        found.add(canonical_sign(vector))
        return sorted(found, key=witness_key)

    def rank2_is_reflective(self, lattice: Lattice, height_bound: int | None = None) -> Rank2Verdict:
        """Apply the rank-2 criterion: an isotropic vector or a negative root exists.

        Isotropy is exact (b² − ac is a square); negative roots are searched up to
        height_bound. The smallest witness by witness_key is reported.
        """
        if lattice.rank != 2:
            raise LatticeToolError(ErrorCode.WRONG_RANK, f"expected rank 2, got {lattice.rank}")
        self.enumeration.check_hyperbolic(lattice)
        bound = height_bound if height_bound is not None else self.settings.rank2_root_height

        (a, b), (_, c) = lattice.gram
        root, isotropic = integer_nthroot(b * b - a * c, 2)
        witnesses: list[tuple[tuple[int, ...], str]] = []
        if isotropic:
            witnesses += [(v, "IsotropicVector") for v in self._isotropic_directions(a, b, c, int(root))]
        witnesses += [(v, "NegativeRoot") for v in self._negative_roots(lattice, bound)]

        if not witnesses:
            logger.info("No rank-2 witness within bound", gram=lattice.gram, height_bound=bound)
            return Rank2Verdict(
                reflective=None, reason="NoWitness", isotropic=False, height_bound=bound
            )

        vector, reason = min(witnesses, key=lambda w: witness_key(w[0]))
        return Rank2Verdict(
            reflective=True,
            reason=reason,  # type: ignore[arg-type]
            witness=vector,
            isotropic=bool(isotropic),
            height_bound=bound,
        )

    def default_controller(self, lattice: Lattice) -> tuple[int, ...]:
        """Find the smallest positive-norm vector (by enumeration_key, first nonzero positive)."""
        self.enumeration.check_hyperbolic(lattice)
        height = 1
        while True:
            candidates = [
                v
                for v in product(range(-height, height + 1), repeat=lattice.rank)
                if vector_height(v) == height
                and canonical_sign(v) == v
                and self.lattices.norm(lattice, v) > 0
            ]
            if candidates:
                return min(candidates, key=enumeration_key)
            height += 1

    def tie_break_direction(
        self, lattice: Lattice, controller: Sequence[int], orthogonal_roots: Sequence[Root]
    ) -> tuple[int, ...]:
        """Find ε ∈ v0^⊥ pairing nontrivially with every root orthogonal to v0."""
        height = 1
        while True:
            candidates = [
                v
                for v in product(range(-height, height + 1), repeat=lattice.rank)
                if vector_height(v) == height
                and canonical_sign(v) == v
                and self.lattices.inner(lattice, v, controller) == 0
                and all(self.lattices.inner(lattice, v, r.vector) != 0 for r in orthogonal_roots)
            ]
            if candidates:
                return min(candidates, key=enumeration_key)
            height += 1

    def default_interior_point(self, lattice: Lattice) -> tuple[int, ...]:
        """Find a positive vector off every (−2) mirror, starting from the controller.

        When (−2) roots are orthogonal to v0 the point is moved to N·v0 + ε with
        ε from tie_break_direction; N² > −ε²·(2 + 1/v0²) leaves no root orthogonal.
        """
        v0 = self.default_controller(lattice)
        if not self.lattices.is_even(lattice):
            return v0
        orthogonal = self.enumeration.enumerate_roots(lattice, v0, 0, [-2])
        if not orthogonal:
            return v0

        epsilon = self.tie_break_direction(lattice, v0, orthogonal)
        spread = -Rational(self.lattices.norm(lattice, epsilon)) * (
            2 + 1 / Rational(self.lattices.norm(lattice, v0))
        )
        scale = int(integer_nthroot(int(spread.p // spread.q) + 1, 2)[0]) + 1
        point = tuple(scale * a + b for a, b in zip(v0, epsilon, strict=True))
        logger.debug("Interior point moved off mirrors", controller=v0, point=point)
        return point

    def _orient_orthogonal(
        self, lattice: Lattice, roots: Sequence[Root], tie_break: Sequence[int]
    ) -> list[Root]:
        oriented: list[Root] = []
        for root in roots:
            vector = root.vector
            pairing = self.lattices.inner(lattice, vector, tie_break)
            if pairing > 0:
                vector = tuple(-c for c in vector)
            oriented.append(
                Root(vector=vector, norm=root.norm, priority=Rational(pairing * pairing, -root.norm))
            )
        # priority of zero-level roots is taken against ε
        oriented.sort(key=lambda r: (r.priority, r.vector))
        return [Root(vector=r.vector, norm=r.norm, priority=Rational(0)) for r in oriented]

    @staticmethod
    def priority_windows(limit: Rational) -> list[Rational]:
        """Get the priority levels 0, 1, 2, 4, ... capped at limit."""
        if limit < 0:
            return []
        windows = [Rational(0)]
        step = Rational(1)
        while step < limit:
            windows.append(step)
            step *= 2
        if limit > 0:
            windows.append(limit)
        return windows

    def chamber_vertices(
        self, lattice: Lattice, walls: Sequence[Root], controller: Sequence[int]
    ) -> list[Vertex] | None:
        """List the extreme rays of {x : x·δ <= 0} if the chamber has finite volume, else None."""
        size = lattice.rank
        if size > MAX_CERTIFIED_RANK:
            raise LatticeToolError(
                ErrorCode.RANK_TOO_LARGE,
                f"finite-volume check is implemented up to rank {MAX_CERTIFIED_RANK}",
            )
        if size == 1:
            return []

        gram = Matrix(self.lattices.gram_matrix(lattice))
        normals = [list(gram * Matrix(w.vector)) for w in walls]
        if not normals or Matrix(normals).rank() < size:
            return None

        def pairings(ray: Sequence[int]) -> list[int]:
            return [int(sum(n * r for n, r in zip(normal, ray, strict=True))) for normal in normals]

        vertices: dict[tuple[int, ...], Vertex] = {}
        for subset in combinations(range(len(walls)), size - 1):
            block = Matrix([normals[i] for i in subset])
            if block.rank() < size - 1:
                continue
            ray = primitive_part(list(block.nullspace()[0]))
            for candidate in (ray, tuple(-c for c in ray)):
                values = pairings(candidate)
                if all(v <= 0 for v in values):
                    break
            else:
                continue
            if candidate in vertices:
                continue

            norm = self.lattices.norm(lattice, candidate)
            if norm < 0 or self.lattices.inner(lattice, candidate, controller) <= 0:
                return None
            if norm == 0 and size == 2:
                # an ideal endpoint of a hyperbolic segment has infinite length
                return None
            vertices[candidate] = Vertex(
                ray=candidate,
                walls=tuple(k for k, v in enumerate(values) if v == 0),
                kind="Interior" if norm > 0 else "Ideal",
            )

        return sorted(vertices.values(), key=lambda v: enumeration_key(v.ray))

    def finite_volume_check(self, lattice: Lattice, polyhedron: FundamentalPolyhedron) -> bool:
        """Check that the chamber cut out by the walls has finite hyperbolic volume."""
        vertices = self.chamber_vertices(
            lattice, polyhedron.walls, polyhedron.controlling_vector
        )
        return vertices is not None

    def _run(
        self,
        lattice: Lattice,
        controller: Sequence[int] | None,
        budget: Budget | None,
    ) -> tuple[FundamentalPolyhedron, BudgetReport]:
        self.enumeration.check_hyperbolic(lattice)
        v0 = tuple(controller) if controller is not None else self.default_controller(lattice)
        self.enumeration.check_controller(lattice, v0)
        budget = budget or self.default_budget()
        norms = tuple(self.enumeration.default_norms(lattice))

        walls: list[Root] = []
        tie_break: tuple[int, ...] | None = None
        examined = 0
        reached = Rational(0)

        def result(status: str, vertices: Sequence[Vertex], reason: str) -> tuple[FundamentalPolyhedron, BudgetReport]:
            polyhedron = FundamentalPolyhedron(
                controlling_vector=v0,
                tie_break=tie_break,
                norm_set=norms,
                walls=tuple(walls),
                vertices=tuple(vertices),
                status=status,  # type: ignore[arg-type]
            )
            report = BudgetReport(
                roots_enumerated=examined,
                priority_reached=reached,
                walls_kept=len(walls),
                reason=reason,
            )
            return polyhedron, report

        if lattice.rank == 1:
            return result("FiniteVolume", [], "rank one")
        if budget.max_walls == 0:
            return result("Partial", [], "wall budget exhausted")

        previous: Rational | None = None
        for window in self.priority_windows(budget.max_priority):
            roots = self.enumeration.enumerate_roots(lattice, v0, window, norms)
            batch = [r for r in roots if previous is None or r.priority > previous]
            if previous is None and batch:
                tie_break = self.tie_break_direction(lattice, v0, batch)
                batch = self._orient_orthogonal(lattice, batch, tie_break)
            previous = window
            reached = window

            for root in batch:
                examined += 1
                if any(self.lattices.inner(lattice, root.vector, w.vector) < 0 for w in walls):
                    continue
                walls.append(root)
                logger.debug("Wall accepted", wall=root.vector, norm=root.norm, walls=len(walls))
                vertices = self.chamber_vertices(lattice, walls, v0)
                if vertices is not None:
                    logger.info("Finite-volume chamber found", walls=len(walls))
                    return result("FiniteVolume", vertices, "finite volume")
                if len(walls) >= budget.max_walls:
                    logger.warning("Vinberg wall budget exhausted", walls=len(walls))
                    return result("Partial", [], "wall budget exhausted")

        logger.warning("Vinberg priority budget exhausted", priority=str(reached), walls=len(walls))
        return result("Partial", [], "priority budget exhausted")

    def vinberg_run(
        self,
        lattice: Lattice,
        controller: Sequence[int] | None = None,
        budget: Budget | None = None,
    ) -> FundamentalPolyhedron:
        """Build the fundamental chamber wall by wall in priority order."""
        polyhedron, _ = self._run(lattice, controller, budget)
        return polyhedron

    def is_reflective(
        self,
        lattice: Lattice,
        budget: Budget | None = None,
        controller: Sequence[int] | None = None,
        height_bound: int | None = None,
    ) -> ReflectivityVerdict:
        """Dispatch to the rank-1, rank-2 or Vinberg criterion. Never claims non-reflectivity."""
        self.enumeration.check_hyperbolic(lattice)

        if lattice.rank == 1:
            self.rank1_is_reflective(lattice)
            certificate, _ = self._run(lattice, controller, budget)
            return ReflectivityVerdict(verdict="Reflective", method="rank1", certificate=certificate)

        if lattice.rank == 2:
            criterion = self.rank2_is_reflective(lattice, height_bound)
            if criterion.reflective:
                return ReflectivityVerdict(verdict="Reflective", method="rank2", rank2=criterion)
            return ReflectivityVerdict(
                verdict="Indeterminate",
                method="rank2",
                rank2=criterion,
                budget_report=BudgetReport(
                    roots_enumerated=0,
                    priority_reached=Rational(0),
                    walls_kept=0,
                    reason=f"no witness up to height {criterion.height_bound}",
                ),
            )

        if lattice.rank > MAX_CERTIFIED_RANK:
            return ReflectivityVerdict(
                verdict="Indeterminate",
                method="vinberg",
                budget_report=BudgetReport(
                    roots_enumerated=0,
                    priority_reached=Rational(0),
                    walls_kept=0,
                    reason=f"rank {lattice.rank} is above the certified rank",
                ),
            )

        polyhedron, report = self._run(lattice, controller, budget)
        if polyhedron.status == "FiniteVolume":
            return ReflectivityVerdict(verdict="Reflective", method="vinberg", certificate=polyhedron)
        return ReflectivityVerdict(verdict="Indeterminate", method="vinberg", budget_report=report)

    def separating_roots(
        self, lattice: Lattice, point: Sequence[Rational], image: Sequence[Rational]
    ) -> list[Root]:
        """List the (−2) roots whose mirror strictly separates point from image."""
        point_norm = Rational(self.lattices.norm(lattice, point))
        pairing = Rational(self.lattices.inner(lattice, point, image))
        # |δ·p|²/2 <= (p·q)²/p² − p² for a separating (−2) root
        bound = pairing * pairing / point_norm - point_norm
        roots = self.enumeration.enumerate_roots(lattice, point, bound, [-2])
        return [
            r
            for r in roots
            if self.lattices.inner(lattice, r.vector, point)
            * self.lattices.inner(lattice, r.vector, image)
            < 0
        ]

    def reduce_mod_w2(
        self,
        lattice: Lattice,
        isometry: IsometryQ,
        point: Sequence[Any] | None = None,
        max_steps: int | None = None,
    ) -> WalkResult:
        """Walk f(p) back to the chamber of p through (−2) mirrors.

        Each step reflects in the separating mirror first met on the segment
        from f(p) to p, so the walk length equals the number of separating mirrors.
        """
        self.enumeration.check_hyperbolic(lattice)
        if not self.lattices.is_even(lattice):
            raise LatticeToolError(ErrorCode.INVALID_ARGUMENT, "W^(-2) walks need an even lattice")
        if not self.reflections.is_integral(lattice, isometry):
            raise LatticeToolError(ErrorCode.NON_INTEGRAL_INPUT, "isometry is not integral")

        raw = point if point is not None else self.default_interior_point(lattice)
        p = tuple(Rational(c) for c in raw)
        self.enumeration.check_controller(lattice, p)
        limit = max_steps if max_steps is not None else self.settings.walk_max_steps

        current = isometry
        image = self.reflections.apply(current, p)
        orientation = 1 if self.lattices.inner(lattice, image, p) > 0 else -1
        walk: list[tuple[int, ...]] = []

        while True:
            image = tuple(orientation * c for c in self.reflections.apply(current, p))
            separating = self.separating_roots(lattice, p, image)
            if not separating:
                break
            if len(walk) >= limit:
                logger.warning("Walk budget exceeded", steps=len(walk), remaining=len(separating))
                return WalkResult(
                    word=ReflectionWord(mirrors=tuple(reversed(walk))),
                    reduced=current,
                    interior_point=p,
                    steps=len(walk),
                    budget_exceeded=True,
                )

            def crossing(root: Root) -> tuple[Rational, tuple[int, ...]]:
                at_image = Rational(self.lattices.inner(lattice, root.vector, image))
                at_point = Rational(self.lattices.inner(lattice, root.vector, p))
                return at_image / (at_image - at_point), root.vector

            mirror = min(separating, key=crossing).vector
            current = self.reflections.compose(self.reflections.reflection(lattice, mirror), current)
            walk.append(mirror)

        logger.debug("Walk finished", steps=len(walk))
        return WalkResult(
            word=ReflectionWord(mirrors=tuple(reversed(walk))),
            reduced=current,
            interior_point=p,
            steps=len(walk),
        )


# Singleton instance
_vinberg_service: VinbergService | None = None


def get_vinberg_service() -> VinbergService:
    """Get Vinberg service instance."""
    global _vinberg_service
    if _vinberg_service is None:
        _vinberg_service = VinbergService()
    return _vinberg_service
