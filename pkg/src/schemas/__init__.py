# Schemas module
from src.schemas.certificate import Certificate, CertificateKind, VerifyResult
from src.schemas.common import (
    BatchItem,
    BatchReport,
    ErrorCode,
    ErrorDetail,
    Provenance,
    Report,
    ToolInfo,
)
from src.schemas.lattice import (
    DiscriminantForm,
    IsomorphismResult,
    Lattice,
    LatticeFile,
    LatticeInfo,
    Signature,
    SimilarityResult,
)
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
from src.schemas.reflection import (
    DecompositionReport,
    IsometryQ,
    ReflectionClass,
    ReflectionReport,
    ReflectionWord,
    Root,
)
from src.schemas.vinberg import (
    Budget,
    BudgetReport,
    FundamentalPolyhedron,
    Rank2Verdict,
    ReflectivityVerdict,
    RootList,
    Vertex,
    WalkResult,
)

__all__ = [
    # Common
    "BatchItem",
    "BatchReport",
    "ErrorCode",
    "ErrorDetail",
    "Provenance",
    "Report",
    "ToolInfo",
    # Lattice
    "DiscriminantForm",
    "IsomorphismResult",
    "Lattice",
    "LatticeFile",
    "LatticeInfo",
    "Signature",
    "SimilarityResult",
    # Reflection
    "DecompositionReport",
    "IsometryQ",
    "ReflectionClass",
    "ReflectionReport",
    "ReflectionWord",
    "Root",
    # Vinberg
    "Budget",
    "BudgetReport",
    "FundamentalPolyhedron",
    "Rank2Verdict",
    "ReflectivityVerdict",
    "RootList",
    "Vertex",
    "WalkResult",
    # Mukai
    "AlgebraicMukaiLattice",
    "AutOrders",
    "CorrespondenceAction",
    "CorrespondenceWord",
    "GeneratingSet",
    "Letter",
    "ModuliPicard",
    "MukaiVector",
    "TyurinResult",
    # Certificate
    "Certificate",
    "CertificateKind",
    "VerifyResult",
]
