"""Test configuration and fixtures."""

import os
import random
from collections.abc import Callable
from pathlib import Path

import pytest
from click.testing import CliRunner

# Set test environment
os.environ["LOG_LEVEL"] = "error"

# Import after setting environment
from src.main import cli  # noqa: E402
from src.schemas.lattice import Lattice  # noqa: E402
from src.services.certificate_service import CertificateService, get_certificate_service  # noqa: E402
from src.services.enumeration_service import EnumerationService, get_enumeration_service  # noqa: E402
from src.services.lattice_service import LatticeService, get_lattice_service  # noqa: E402
from src.services.mukai_service import MukaiService, get_mukai_service  # noqa: E402
from src.services.reflection_service import ReflectionService, get_reflection_service  # noqa: E402
from src.services.vinberg_service import VinbergService, get_vinberg_service  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    """Directory holding lattice and matrix files."""
    return FIXTURES


@pytest.fixture
def runner() -> CliRunner:
    """Create a CLI runner."""
    return CliRunner()


@pytest.fixture
def invoke(runner: CliRunner) -> Callable[..., object]:
    """Invoke the reflattice command line with arguments."""

    def run(*args: str | Path):
        return runner.invoke(cli, [str(a) for a in args])

    return run


@pytest.fixture
def lattices() -> LatticeService:
    """Lattice service singleton."""
    return get_lattice_service()


@pytest.fixture
def reflections() -> ReflectionService:
    """Reflection service singleton."""
    return get_reflection_service()


@pytest.fixture
def enumeration() -> EnumerationService:
    """Root enumeration service singleton."""
    return get_enumeration_service()


@pytest.fixture
def vinberg() -> VinbergService:
    """Vinberg service singleton."""
    return get_vinberg_service()


@pytest.fixture
def mukai() -> MukaiService:
    """Mukai and correspondence service singleton."""
    return get_mukai_service()


@pytest.fixture
def certificates() -> CertificateService:
    """Certificate service singleton."""
    return get_certificate_service()


@pytest.fixture
def make(lattices: LatticeService) -> Callable[..., Lattice]:
    """Build a lattice from a Gram matrix."""

    def build(gram: list[list[int]], name: str | None = None) -> Lattice:
        return lattices.make_lattice(gram, name=name)

    return build


@pytest.fixture
def hyperbolic_plane(make: Callable[..., Lattice]) -> Lattice:
    """U = [[0,1],[1,0]]."""
    return make([[0, 1], [1, 0]], "U")


@pytest.fixture
def u_plus_a1(make: Callable[..., Lattice]) -> Lattice:
    """U ⊕ ⟨−2⟩."""
    return make([[0, 1, 0], [1, 0, 0], [0, 0, -2]], "U+A1(-1)")


@pytest.fixture
def rng() -> random.Random:
    """Seeded generator for property tests."""
    return random.Random(20240611)
