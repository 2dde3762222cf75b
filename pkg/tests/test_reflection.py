"""Tests for roots, reflections and reflection words."""

from itertools import product

import pytest
from sympy import ImmutableMatrix, Matrix, Rational, eye

from src.exceptions import LatticeToolError
from src.schemas.common import ErrorCode
from src.schemas.lattice import Lattice
from src.schemas.reflection import ReflectionWord
from src.services.lattice_service import primitive_part, vector_gcd
from src.services.reflection_service import ReflectionService


def matrix(rows) -> ImmutableMatrix:
    return ImmutableMatrix([[Rational(entry) for entry in row] for row in rows])


class TestRoots:
    """Tests for the root predicate."""

    def test_minus_two_vectors_are_roots(self, reflections: ReflectionService, u_plus_a1: Lattice):
        """Test norm -2 vectors of an even lattice are roots."""
        for vector in [(0, 0, 1), (1, -1, 0), (1, 0, 1), (0, 1, 1)]:
            assert reflections.lattices.norm(u_plus_a1, vector) == -2
            assert reflections.is_root(u_plus_a1, vector)

    def test_divisibility(self, reflections: ReflectionService, hyperbolic_plane: Lattice, make):
        """Test the divisibility condition for norms other than -2."""
        assert reflections.is_root(hyperbolic_plane, (1, 1))
        assert reflections.is_root(make([[2, 0], [0, -6]]), (1, 1))
        assert not reflections.is_root(hyperbolic_plane, (2, -1))
        assert not reflections.is_root(hyperbolic_plane, (1, 0))


class TestReflection:
    """Tests for reflection matrices."""

    def test_swap(self, reflections: ReflectionService, hyperbolic_plane: Lattice):
        """Test s_(1,-1) on U swaps the basis vectors."""
        reflection = reflections.reflection(hyperbolic_plane, (1, -1))
        assert reflection.matrix == matrix([[0, 1], [1, 0]])
        assert reflections.is_integral(hyperbolic_plane, reflection)

    def test_rank_one(self, reflections: ReflectionService, make):
        """Test s_e on diag(1) is x -> -x."""
        assert reflections.reflection(make([[1]]), (1,)).matrix == matrix([[-1]])

    def test_isotropic_mirror(self, reflections: ReflectionService, hyperbolic_plane: Lattice):
        """Test isotropic mirrors are rejected."""
        with pytest.raises(LatticeToolError) as exc:
            reflections.reflection(hyperbolic_plane, (1, 0))
        assert exc.value.code == ErrorCode.ISOTROPIC_MIRROR

    def test_zero_mirror(self, reflections: ReflectionService, hyperbolic_plane: Lattice):
        """Test the zero vector is rejected."""
        with pytest.raises(LatticeToolError) as exc:
            reflections.reflection(hyperbolic_plane, (0, 0))
        assert exc.value.code == ErrorCode.ZERO_VECTOR

    def test_non_integral(self, reflections: ReflectionService, hyperbolic_plane: Lattice):
        """Test s_(2,-1) on U has half-integer entries."""
        reflection = reflections.reflection(hyperbolic_plane, (2, -1))
        assert not reflections.is_integral(hyperbolic_plane, reflection)
        assert any(Rational(entry).q == 2 for entry in reflection.matrix)

    def test_rational_mirror(self, reflections: ReflectionService, hyperbolic_plane: Lattice):
        """Test a rational mirror reflects like its integral multiple."""
        half = reflections.reflection(hyperbolic_plane, ("1/2", "-1/2"))
        whole = reflections.reflection(hyperbolic_plane, (1, -1))
        assert half.matrix == whole.matrix

    def test_involution(self, reflections: ReflectionService, u_plus_a1: Lattice):
        """Test s_H ∘ s_H is the identity."""
        reflection = reflections.reflection(u_plus_a1, (1, 2, 1))
        assert reflections.compose(reflection, reflection).matrix == eye(3)

    def test_inverse(self, reflections: ReflectionService, hyperbolic_plane: Lattice):
        """Test f ∘ f⁻¹ is the identity."""
        stretch = reflections.make_isometry(hyperbolic_plane, [[2, 0], [0, "1/2"]])
        assert reflections.compose(stretch, reflections.invert(stretch)).matrix == eye(2)

    def test_infinite_order_product(self, reflections: ReflectionService, make):
        """Test two non-proportional mirrors in diag(1,-3) give a rotation of infinite order."""
        lattice = make([[1, 0], [0, -3]])
        rotation = reflections.compose(
            reflections.reflection(lattice, (0, 1)), reflections.reflection(lattice, (1, 1))
        )
        assert abs(rotation.matrix.trace()) > 2
        power = rotation.matrix
        for _ in range(12):
            assert power != eye(2)
            power = power * rotation.matrix

    def test_ambient_mismatch(self, reflections: ReflectionService, hyperbolic_plane, make):
        """Test composing isometries of different lattices fails."""
        other = make([[2, 0], [0, -2]])
        with pytest.raises(LatticeToolError) as exc:
            reflections.compose(
                reflections.identity(hyperbolic_plane), reflections.identity(other)
            )
        assert exc.value.code == ErrorCode.AMBIENT_MISMATCH

    def test_classification(self, reflections: ReflectionService, hyperbolic_plane: Lattice):
        """Test positive and negative reflections."""
        positive = reflections.classify_reflection(hyperbolic_plane, (1, 1))
        assert positive.kind == "positive"
        assert positive.norm == 2
        negative = reflections.classify_reflection(hyperbolic_plane, (2, -2))
        assert negative.kind == "negative"
        assert negative.mirror == (1, -1)
        assert negative.integral


class TestIsometry:
    """Tests for isometry validation."""

    def test_not_isometry(self, reflections: ReflectionService, hyperbolic_plane: Lattice):
        """Test a shear of U is rejected."""
        with pytest.raises(LatticeToolError) as exc:
            reflections.make_isometry(hyperbolic_plane, [[1, 1], [0, 1]])
        assert exc.value.code == ErrorCode.NOT_ISOMETRY

    def test_wrong_shape(self, reflections: ReflectionService, hyperbolic_plane: Lattice):
        """Test a 3x3 matrix on a rank-2 lattice is rejected."""
        with pytest.raises(LatticeToolError) as exc:
            reflections.make_isometry(hyperbolic_plane, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        assert exc.value.code == ErrorCode.DIMENSION_MISMATCH

    def test_malformed(self, reflections: ReflectionService, hyperbolic_plane: Lattice):
        """Test non-numeric entries are rejected."""
        with pytest.raises(LatticeToolError) as exc:
            reflections.make_isometry(hyperbolic_plane, [["x", 0], [0, 1]])
        assert exc.value.code == ErrorCode.MALFORMED_INPUT


class TestDecomposition:
    """Tests for Cartan–Dieudonné decompositions."""

    def test_identity(self, reflections: ReflectionService, u_plus_a1: Lattice):
        """Test the identity decomposes to the empty word."""
        word = reflections.decompose_isometry(u_plus_a1, reflections.identity(u_plus_a1))
        assert word.mirrors == ()

    def test_minus_identity(self, reflections: ReflectionService, make):
        """Test -1 on diag(1,1) is the product of the two coordinate reflections."""
        lattice = make([[1, 0], [0, 1]])
        minus = reflections.make_isometry(lattice, [[-1, 0], [0, -1]])
        word = reflections.decompose_isometry(lattice, minus)
        assert word.mirrors == ((1, 0), (0, 1))
        assert word.sign == 1

    def test_stretch(self, reflections: ReflectionService, hyperbolic_plane: Lattice):
        """Test e -> 2e, f -> f/2 on U is a product of at most four reflections."""
        stretch = reflections.make_isometry(hyperbolic_plane, [[2, 0], [0, "1/2"]])
        word = reflections.decompose_isometry(hyperbolic_plane, stretch)
        assert 1 <= len(word) <= 4
        assert reflections.evaluate_word(hyperbolic_plane, word).matrix == stretch.matrix

    def test_random_words_replay(self, reflections: ReflectionService, make, rng):
        """Test 200 random products of at most six root reflections on lattices of rank <= 5."""
        checked = 0
        while checked < 200:
            lattice = random_even_lattice(make, rng, rng.randint(1, 5))
            mirrors = random_roots(reflections, lattice, rng, rng.randint(1, 6))
            if mirrors is None:
                continue
            composite = reflections.evaluate_word(lattice, ReflectionWord(mirrors=tuple(mirrors)))
            word = reflections.decompose_isometry(lattice, composite)
            assert len(word) <= 2 * lattice.rank
            assert reflections.evaluate_word(lattice, word).matrix == composite.matrix
            checked += 1


class TestEvaluateWord:
    """Tests for multiplying out reflection words."""

    def test_empty(self, reflections: ReflectionService, hyperbolic_plane: Lattice):
        """Test the empty word is the identity."""
        assert reflections.evaluate_word(hyperbolic_plane, ReflectionWord()).matrix == eye(2)

    def test_sign_cancels_in_rank_one(self, reflections: ReflectionService, make):
        """Test -s_e = 1 on diag(1)."""
        word = ReflectionWord(sign=-1, mirrors=((1,),))
        assert reflections.evaluate_word(make([[1]]), word).matrix == eye(1)

    def test_repeated_mirror(self, reflections: ReflectionService, u_plus_a1: Lattice):
        """Test [H, H] evaluates to the identity."""
        word = ReflectionWord(mirrors=((1, 0, 1), (1, 0, 1)))
        assert reflections.evaluate_word(u_plus_a1, word).matrix == eye(3)

    def test_order_of_letters(self, reflections: ReflectionService, u_plus_a1: Lattice):
        """Test the last mirror acts first."""
        first, second = (0, 0, 1), (1, -1, 0)
        word = ReflectionWord(mirrors=(first, second))
        expected = Matrix(reflections.reflection(u_plus_a1, first).matrix) * Matrix(
            reflections.reflection(u_plus_a1, second).matrix
        )
        assert reflections.evaluate_word(u_plus_a1, word).matrix == expected


def random_even_lattice(make, rng, rank: int):
    """Random nondegenerate even Gram matrix of the given rank."""
    while True:
        rows = [[0] * rank for _ in range(rank)]
        for i in range(rank):
            rows[i][i] = 2 * rng.randint(-3, 3)
            for j in range(i + 1, rank):
                rows[i][j] = rows[j][i] = rng.randint(-2, 2)
        if Matrix(rows).det() != 0:
            return make(rows)


def random_roots(reflections: ReflectionService, lattice: Lattice, rng, count: int):
    """Draw count primitive roots from a small box, or None when they are too rare."""
    found: list[tuple[int, ...]] = []
    for _ in range(50 * count):
        raw = [rng.randint(-3, 3) for _ in range(lattice.rank)]
        if not any(raw):
            continue
        delta = primitive_part(raw)
        if reflections.is_root(lattice, delta):
            found.append(delta)
            if len(found) == count:
                return found
    return None


class TestReflectionAxioms:
    """Property tests for reflections in random even lattices."""

    def test_axioms(self, reflections: ReflectionService, make, rng):
        """Test s_δ² = 1, s_δ(δ) = −δ and integrality for 1,000 random roots."""
        checked = 0
        while checked < 1000:
            lattice = random_even_lattice(make, rng, rng.randint(1, 4))
            roots = random_roots(reflections, lattice, rng, 5)
            if roots is None:
                continue
            for delta in roots:
                reflection = reflections.reflection(lattice, delta)
                assert reflections.compose(reflection, reflection).matrix == eye(lattice.rank)
                assert reflections.apply(reflection, delta) == tuple(-c for c in delta)
                assert reflections.is_integral(lattice, reflection)
            checked += len(roots)

    def test_integral_exactly_for_roots(self, reflections: ReflectionService, make, rng):
        """Test s_δ is integral exactly when δ is a root, for random anisotropic δ."""
        checked = 0
        while checked < 200:
            lattice = random_even_lattice(make, rng, rng.randint(1, 4))
            raw = [rng.randint(-3, 3) for _ in range(lattice.rank)]
            if not any(raw) or reflections.lattices.norm(lattice, raw) == 0:
                continue
            delta = primitive_part(raw)
            reflection = reflections.reflection(lattice, delta)
            assert reflections.is_integral(lattice, reflection) == reflections.is_root(
                lattice, delta
            )
            checked += 1


EXHAUSTIVE_LATTICES = [
    ([[2]], 10),
    ([[-6]], 10),
    ([[0, 1], [1, 0]], 10),
    ([[2, 0], [0, -6]], 10),
    ([[2, 1], [1, -4]], 10),
    ([[1, 0], [0, -3]], 10),
    ([[0, 1, 0], [1, 0, 0], [0, 0, -2]], 10),
    ([[2, 1, 0], [1, -2, 1], [0, 1, -4]], 6),
]


class TestRootCriterion:
    """Exhaustive checks of the root predicate against integrality of s_δ."""

    @pytest.mark.parametrize("gram,height", EXHAUSTIVE_LATTICES)
    def test_integral_exactly_for_primitive_roots(
        self, reflections: ReflectionService, make, gram, height
    ):
        """Test is_integral(s_δ) ⇔ is_root(δ) for every primitive anisotropic δ in a box."""
        lattice = make(gram)
        for delta in product(range(-height, height + 1), repeat=lattice.rank):
            if vector_gcd(delta) != 1 or reflections.lattices.norm(lattice, delta) == 0:
                continue
            reflection = reflections.reflection(lattice, delta)
            assert reflections.is_integral(lattice, reflection) == reflections.is_root(
                lattice, delta
            ), delta
