"""Certificate emission and replay."""

import json
from collections.abc import Callable
from itertools import combinations
from pathlib import Path
from typing import Any

import structlog
from pydantic import BaseModel, ValidationError
from sympy import ImmutableMatrix, Matrix, Rational

from src.config import get_settings
from src.exceptions import LatticeToolError
from src.schemas.certificate import Certificate, CertificateKind, VerifyResult
from src.schemas.common import ErrorCode, parse_matrix
from src.schemas.lattice import DiscriminantForm, Lattice, LatticeFile, LatticeInfo, SimilarityResult
from src.schemas.mukai import (
    MUKAI_CONVENTION,
    WORD_CONVENTION,
    AutOrders,
    CorrespondenceAction,
    CorrespondenceWord,
    GeneratingSet,
    ModuliPicard,
    MukaiVector,
    TyurinResult,
)
from src.schemas.reflection import DecompositionReport, ReflectionReport
from src.schemas.vinberg import (
    PRIORITY_CONVENTION,
    VINBERG_CONVENTION,
    Budget,
    FundamentalPolyhedron,
    ReflectivityVerdict,
    RootList,
    WalkResult,
)
from src.services.enumeration_service import EnumerationService, get_enumeration_service
from src.services.lattice_service import LatticeService, get_lattice_service, vector_gcd
from src.services.mukai_service import MukaiService, get_mukai_service
from src.services.reflection_service import ReflectionService, get_reflection_service
from src.services.vinberg_service import VinbergService, get_vinberg_service

logger = structlog.get_logger()

CONVENTIONS = [MUKAI_CONVENTION, WORD_CONVENTION, VINBERG_CONVENTION, PRIORITY_CONVENTION]

RESULT_MODELS: dict[str, type[BaseModel]] = {
    "lattice-info": LatticeInfo,
    "disc": DiscriminantForm,
    "similar": SimilarityResult,
    "roots": RootList,
    "reflect": ReflectionReport,
    "decompose": DecompositionReport,
    "vinberg": FundamentalPolyhedron,
    "reflective": ReflectivityVerdict,
    "reduce-w2": WalkResult,
    "mukai-moduli": ModuliPicard,
    "tyurin": TyurinResult,
    "corr-decompose": CorrespondenceWord,
    "generators": GeneratingSet,
    "aut-orders": AutOrders,
}


def budget_from_inputs(inputs: dict[str, Any]) -> Budget | None:
    """Rebuild the Vinberg budget stored in certificate inputs."""
    raw = inputs.get("budget")
    return Budget.model_validate(raw) if raw is not None else None


class CertificateService:
    """Service for writing and replaying certificates."""

    def __init__(self) -> None:
        self.settings = get_settings()
        self.lattices: LatticeService = get_lattice_service()
        self.reflections: ReflectionService = get_reflection_service()
        self.enumeration: EnumerationService = get_enumeration_service()
        self.vinberg: VinbergService = get_vinberg_service()
        self.mukai: MukaiService = get_mukai_service()
        self._replays: dict[str, Callable[[Lattice | None, dict[str, Any], Any], list[str]]] = {
            "lattice-info": self._replay_recompute,
            "disc": self._replay_recompute,
            "similar": self._replay_similar,
            "roots": self._replay_recompute,
            "reflect": self._replay_recompute,
            "decompose": self._replay_decompose,
            "vinberg": self._replay_vinberg,
            "reflective": self._replay_reflective,
            "reduce-w2": self._replay_walk,
            "mukai-moduli": self._replay_moduli,
            "tyurin": self._replay_recompute,
            "corr-decompose": self._replay_correspondence,
            "generators": self._replay_generators,
            "aut-orders": self._replay_recompute,
        }

    def emit(
        self,
        kind: CertificateKind,
        lattice: Lattice | None,
        inputs: dict[str, Any],
        result: BaseModel,
    ) -> Certificate:
        """Build a certificate for a command result."""
        lattice_file = None
        if lattice is not None:
            lattice_file = LatticeFile(name=lattice.name, gram=[list(row) for row in lattice.gram])
        return Certificate(
            kind=kind,
            version=self.settings.app_version,
            conventions=list(CONVENTIONS),
            lattice=lattice_file,
            inputs=inputs,
            result=result.model_dump(mode="json"),
        )

    def write(self, certificate: Certificate, path: Path) -> None:
        """Write a certificate as indented JSON."""
        path.write_text(certificate.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info("Certificate written", kind=certificate.kind, path=str(path))

    def load(self, path: Path) -> Certificate:
        """Read a certificate, raising MALFORMED_CERTIFICATE on any parse error."""
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
            return Certificate.model_validate(raw)
        except (OSError, UnicodeDecodeError, json.JSONDecodeError, ValidationError) as e:
            raise LatticeToolError(
                ErrorCode.MALFORMED_CERTIFICATE, f"cannot read certificate: {e}"
            ) from e

    def compute(self, kind: str, lattice: Lattice | None, inputs: dict[str, Any]) -> BaseModel:
        """Run the command a certificate describes."""
        if kind == "aut-orders":
            return self.mukai.aut_orders_transcendental(int(inputs["rank_t"]))
        if lattice is None:
            raise LatticeToolError(ErrorCode.MALFORMED_CERTIFICATE, f"{kind} needs a lattice")

        if kind == "lattice-info":
            return self.lattices.info(lattice)
        if kind == "disc":
            return self.lattices.discriminant_form(lattice)
        if kind == "similar":
            other = self.lattices.make_lattice(inputs["other"]["gram"], inputs["other"].get("name"))
            return self.lattices.is_similar(lattice, other, inputs.get("bound"))
        if kind == "roots":
            controller = [Rational(c) for c in inputs["controlling_vector"]]
            norms = inputs.get("norms")
            if norms is None:
                norms = self.enumeration.default_norms(lattice)
            roots = self.enumeration.enumerate_roots(lattice, controller, inputs["max_priority"], norms)
            return RootList(
                controlling_vector=tuple(controller),
                max_priority=Rational(inputs["max_priority"]),
                norm_set=tuple(sorted(norms, reverse=True)),
                roots=tuple(roots),
            )
        if kind == "reflect":
            return self.reflection_report(lattice, inputs["mirror"])
        if kind == "decompose":
            isometry = self.reflections.make_isometry(lattice, inputs["action"])
            word = self.reflections.decompose_isometry(lattice, isometry)
            return DecompositionReport(matrix=isometry.matrix, word=word)
        if kind == "vinberg":
            return self.vinberg.vinberg_run(
                lattice, inputs.get("controlling_vector"), budget_from_inputs(inputs)
            )
        if kind == "reflective":
            return self.vinberg.is_reflective(
                lattice, budget_from_inputs(inputs), height_bound=inputs.get("bound")
            )
        if kind == "reduce-w2":
            isometry = self.reflections.make_isometry(lattice, inputs["action"])
            return self.vinberg.reduce_mod_w2(
                lattice, isometry, inputs.get("point"), inputs.get("max_steps")
            )
        if kind == "mukai-moduli":
            mukai = self.mukai.algebraic_mukai_lattice(lattice)
            vector = MukaiVector.model_validate(inputs["v"])
            moduli = self.mukai.moduli_picard(mukai, vector)
            if inputs.get("compare"):
                comparison = self.lattices.isomorphic_small(
                    lattice, moduli.lattice, inputs.get("bound")
                )
                moduli = moduli.model_copy(update={"comparison": comparison})
            return moduli
        if kind == "tyurin":
            mukai = self.mukai.algebraic_mukai_lattice(lattice)
            return self.mukai.tyurin(
                mukai,
                inputs["H"],
                int(inputs["sign"]),
                point=inputs.get("point"),
                reduce=bool(inputs.get("reduce", False)),
            )
        if kind == "corr-decompose":
            action = CorrespondenceAction(
                on_picard=self.reflections.make_isometry(lattice, inputs["action"]),
                transcendental_sign=int(inputs.get("sign", 1)),
            )
            return self.mukai.decompose_correspondence(lattice, action)
        if kind == "generators":
            return self.mukai.generating_correspondences(lattice, budget_from_inputs(inputs))
        raise LatticeToolError(ErrorCode.MALFORMED_CERTIFICATE, f"unknown kind {kind}")

    def reflection_report(self, lattice: Lattice, mirror: list[Any]) -> ReflectionReport:
        """Build the reflect command's result."""
        isometry = self.reflections.reflection(lattice, mirror)
        classification = self.reflections.classify_reflection(lattice, mirror)
        return ReflectionReport(
            mirror=classification.mirror,
            matrix=isometry.matrix,
            classification=classification,
            is_root=self.reflections.is_root(lattice, classification.mirror),
        )

    def verify(self, certificate: Certificate) -> VerifyResult:
        """Replay a certificate against its lattice; raise REPLAY_MISMATCH on any failure."""
        lattice = None
        if certificate.lattice is not None:
            lattice = self.lattices.make_lattice(certificate.lattice.gram, certificate.lattice.name)
        try:
            result = RESULT_MODELS[certificate.kind].model_validate(certificate.result)
        except (ValidationError, ValueError) as e:
            raise LatticeToolError(
                ErrorCode.MALFORMED_CERTIFICATE, f"bad {certificate.kind} result: {e}"
            ) from e

        if certificate.conventions != CONVENTIONS:
            raise LatticeToolError(ErrorCode.REPLAY_MISMATCH, "certificate uses other conventions")

        try:
            checks = self._replays[certificate.kind](lattice, certificate.inputs, result)
        except KeyError as e:
            raise LatticeToolError(
                ErrorCode.MALFORMED_CERTIFICATE, f"missing input {e} for {certificate.kind}"
            ) from e
        logger.info("Certificate replayed", kind=certificate.kind, checks=len(checks))
        return VerifyResult(kind=certificate.kind, checks=checks, ok=True)

    @staticmethod
    def _require(condition: bool, message: str) -> None:
        if not condition:
            raise LatticeToolError(ErrorCode.REPLAY_MISMATCH, message)

    def _need_lattice(self, lattice: Lattice | None) -> Lattice:
        if lattice is None:
            raise LatticeToolError(ErrorCode.MALFORMED_CERTIFICATE, "certificate has no lattice")
        return lattice

    def _replay_recompute(
        self, lattice: Lattice | None, inputs: dict[str, Any], result: BaseModel
    ) -> list[str]:
        kind = next(k for k, model in RESULT_MODELS.items() if isinstance(result, model))
        recomputed = self.compute(kind, lattice, inputs)
        self._require(
            recomputed.model_dump(mode="json") == result.model_dump(mode="json"),
            f"recomputed {kind} result differs",
        )
        return ["recompute"]

    def _replay_similar(
        self, lattice: Lattice | None, inputs: dict[str, Any], result: SimilarityResult
    ) -> list[str]:
        lattice = self._need_lattice(lattice)
        isomorphism = result.isomorphism
        if result.similar and isomorphism is not None and isomorphism.witness is not None:
            other = self.lattices.make_lattice(inputs["other"]["gram"])
            scaled = self.lattices.rescale(lattice, result.scale)
            witness = Matrix(isomorphism.witness)
            product = witness.T * Matrix(scaled.gram) * witness
            self._require(product == Matrix(other.gram), "similarity witness does not replay")
            return ["witness"]
        return self._replay_recompute(lattice, inputs, result)

    def _replay_decompose(
        self, lattice: Lattice | None, inputs: dict[str, Any], result: DecompositionReport
    ) -> list[str]:
        lattice = self._need_lattice(lattice)
        expected = parse_matrix(inputs["action"])
        self._require(result.matrix == expected, "stored matrix differs from the input action")
        self._require(len(result.word) <= 2 * lattice.rank, "word is longer than 2·rank")
        evaluated = self.reflections.evaluate_word(lattice, result.word)
        self._require(evaluated.matrix == expected, "reflection word does not evaluate to the action")
        return ["matrix", "length", "evaluation"]

    def _replay_polyhedron(self, lattice: Lattice, polyhedron: FundamentalPolyhedron) -> list[str]:
        v0 = polyhedron.controlling_vector
        self._require(self.lattices.norm(lattice, v0) > 0, "controlling vector is not positive")
        self._require(
            tuple(self.enumeration.default_norms(lattice)) == polyhedron.norm_set,
            "norm set differs",
        )
        for wall in polyhedron.walls:
            self._require(
                self.lattices.norm(lattice, wall.vector) == wall.norm < 0,
                f"wall {wall.vector} has wrong norm",
            )
            self._require(self.reflections.is_root(lattice, wall.vector), f"wall {wall.vector} is not a root")
            self._require(
                self.lattices.inner(lattice, wall.vector, v0) <= 0,
                f"wall {wall.vector} is on the wrong side of the controlling vector",
            )
        for first, second in combinations(polyhedron.walls, 2):
            self._require(first.vector != second.vector, f"wall {first.vector} is repeated")
            self._require(
                self.lattices.inner(lattice, first.vector, second.vector) >= 0,
                f"walls {first.vector} and {second.vector} form an obtuse angle",
            )
        checks = ["controlling-vector", "walls", "angles"]

        if polyhedron.status == "FiniteVolume":
            vertices = self.vinberg.chamber_vertices(lattice, polyhedron.walls, v0)
            self._require(vertices is not None, "chamber does not have finite volume")
            self._require(tuple(vertices or ()) == polyhedron.vertices, "vertex list differs")
            checks.append("finite-volume")
        return checks

    def _replay_vinberg(
        self, lattice: Lattice | None, inputs: dict[str, Any], result: FundamentalPolyhedron
    ) -> list[str]:
        return self._replay_polyhedron(self._need_lattice(lattice), result)

    def _replay_reflective(
        self, lattice: Lattice | None, inputs: dict[str, Any], result: ReflectivityVerdict
    ) -> list[str]:
        lattice = self._need_lattice(lattice)
        if result.verdict == "Indeterminate":
            return self._replay_recompute(lattice, inputs, result)

        if result.method == "rank2":
            criterion = result.rank2
            self._require(criterion is not None and criterion.witness is not None, "missing witness")
            assert criterion is not None and criterion.witness is not None
            norm = self.lattices.norm(lattice, criterion.witness)
            if criterion.reason == "IsotropicVector":
                self._require(norm == 0, "witness is not isotropic")
            else:
                self._require(
                    norm < 0 and self.reflections.is_root(lattice, criterion.witness),
                    "witness is not a negative root",
                )
            return ["rank2-witness"]

        self._require(result.certificate is not None, "missing fundamental polyhedron")
        assert result.certificate is not None
        self._require(result.certificate.status == "FiniteVolume", "polyhedron is only partial")
        return self._replay_polyhedron(lattice, result.certificate)

    def _replay_walk(
        self, lattice: Lattice | None, inputs: dict[str, Any], result: WalkResult
    ) -> list[str]:
        lattice = self._need_lattice(lattice)
        isometry = self.reflections.make_isometry(lattice, inputs["action"])
        for mirror in result.word.mirrors:
            self._require(
                self.lattices.norm(lattice, mirror) == -2 and self.reflections.is_root(lattice, mirror),
                f"letter {mirror} is not a (-2) root",
            )
        word = self.reflections.evaluate_word(lattice, result.word)
        composed = self.reflections.compose(word, isometry)
        self._require(composed.matrix == result.reduced.matrix, "word ∘ f differs from reduced")
        checks = ["letters", "evaluation"]
        if not result.budget_exceeded:
            image = self.reflections.apply(result.reduced, result.interior_point)
            if self.lattices.inner(lattice, image, result.interior_point) < 0:
                image = tuple(-c for c in image)
            separating = self.vinberg.separating_roots(lattice, result.interior_point, image)
            self._require(not separating, "a (-2) mirror still separates reduced(p) from p")
            checks.append("reduced")
        return checks

    def _replay_moduli(
        self, lattice: Lattice | None, inputs: dict[str, Any], result: ModuliPicard
    ) -> list[str]:
        lattice = self._need_lattice(lattice)
        mukai = self.mukai.algebraic_mukai_lattice(lattice)
        vector = MukaiVector.model_validate(inputs["v"])
        self._require(result.vector == vector, "Mukai vector differs from the input")
        self._require(self.mukai.is_admissible(mukai, vector), "Mukai vector is not admissible")

        coords = vector.coordinates()
        basis = result.perp_basis
        first = basis[0] if basis else ()
        self._require(
            first in (coords, tuple(-c for c in coords)), "first basis vector of v^⊥ is not ±v"
        )
        for column in basis:
            self._require(
                self.lattices.inner(mukai.total, column, coords) == 0, f"{column} is not in v^⊥"
            )
        total = Matrix(mukai.total.gram)
        matrix = Matrix(basis).T
        self._require(matrix.rows == total.rows and matrix.cols == total.rows - 1, "wrong basis size")

        # a basis of v^⊥ is saturated iff its maximal minors are coprime
        minors = [
            int(matrix.extract([i for i in range(total.rows) if i != skip], list(range(matrix.cols))).det())
            for skip in range(total.rows)
        ]
        self._require(vector_gcd(minors) == 1, "v^⊥ basis is not saturated")

        self._require(result.lifts == basis[1:], "lifts differ from the quotient basis")
        lifts = Matrix(result.lifts).T
        gram = lifts.T * total * lifts
        self._require(
            ImmutableMatrix(gram) == ImmutableMatrix(result.lattice.gram), "quotient Gram differs"
        )
        divisibility = self.mukai.divisibility(mukai, vector)
        self._require(result.divisibility == divisibility, "divisibility differs")
        self._require(
            abs(result.lattice.det) * divisibility**2 == abs(lattice.det),
            "quotient determinant is not |det N|/d²",
        )
        checks = ["vector", "orthogonality", "saturation", "gram", "divisibility"]

        comparison = result.comparison
        if comparison is not None and comparison.witness is not None:
            witness = Matrix(comparison.witness)
            product = witness.T * Matrix(lattice.gram) * witness
            self._require(product == Matrix(result.lattice.gram), "comparison witness does not replay")
            self._require(abs(witness.det()) == 1, "comparison witness is not unimodular")
            checks.append("comparison")
        return checks

    def _replay_correspondence(
        self, lattice: Lattice | None, inputs: dict[str, Any], result: CorrespondenceWord
    ) -> list[str]:
        lattice = self._need_lattice(lattice)
        expected = parse_matrix(inputs["action"])
        sign = int(inputs.get("sign", 1))
        self._require(result.sign == sign, "word sign differs from the transcendental sign")
        for letter in result.letters:
            self._require(letter == self.mukai.letter(lattice, letter.vector), f"letter {letter.vector} is misclassified")
        evaluated = self.mukai.evaluate_correspondence(lattice, result)
        self._require(evaluated.on_picard.matrix == expected, "word does not evaluate to the action")
        self._require(result.evaluated == expected, "stored evaluation differs")
        return ["letters", "evaluation"]

    def _replay_generators(
        self, lattice: Lattice | None, inputs: dict[str, Any], result: GeneratingSet
    ) -> list[str]:
        lattice = self._need_lattice(lattice)
        checks = self._replay_polyhedron(lattice, result.certificate)
        expected = tuple(self.mukai.letter(lattice, wall.vector) for wall in result.certificate.walls)
        self._require(result.letters == expected, "letters differ from the chamber walls")
        self._require(
            result.complete == (result.certificate.status == "FiniteVolume"), "completeness flag differs"
        )
        return [*checks, "letters"]


# Singleton instance
_certificate_service: CertificateService | None = None


def get_certificate_service() -> CertificateService:
    """Get certificate service instance."""
    global _certificate_service
    if _certificate_service is None:
        _certificate_service = CertificateService()
    return _certificate_service
