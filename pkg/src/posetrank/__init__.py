"""Generalized rank invariants of poset-indexed persistence modules.

The pipeline: a simplicial filtration over a finite connected poset is
unfolded along an Eulerian tour into a zigzag filtration, the induced zigzag
module is decomposed into intervals with representative cycles, and the full
intervals that fold back to summands of the original module are counted.
That count is the generalized rank (the rank of the limit-to-colimit map),
and a brute-force limit/colimit oracle is included for cross-checking.
"""

from .errors import InputError, ValidationError
from .fplinalg import (
    GF2,
    FieldSpec,
    FpMatrix,
    FpVector,
    column_reduce,
    kernel,
    linearize,
    rank,
    solve,
)
from .poset import PartnerStructure, Poset, ZigzagPoset, partners, unfold, validate_poset
from .filtration import (
    PFiltration,
    SimplicialComplex,
    SizeStats,
    ZigzagFiltration,
    cone,
    size_stats,
    unfold_filtration,
    validate_filtration,
)
from .annotation import AnnotationTable, annotate_batch, annotate_complex, annotate_cycle
from .zigzag import Decomposition, IntervalModule, decompose, is_limit_module, rep_sum
from .genrank import (
    ConvertibilityWitness,
    GenRankResult,
    convert,
    convertibility,
    generalized_rank,
    genrank_dcomplex,
    genrank_graph,
    is_complement_invertible,
    is_foldable,
    kappa,
    tau,
)
from .oracle import (
    ExplicitModule,
    colimit,
    limit,
    limit_to_colimit_rank,
    module_from_filtration,
    restrict_module,
    zigzag_path_module,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationTable",
    "ConvertibilityWitness",
    "Decomposition",
    "ExplicitModule",
    "FieldSpec",
    "FpMatrix",
    "FpVector",
    "GF2",
    "GenRankResult",
    "InputError",
    "IntervalModule",
    "PFiltration",
    "PartnerStructure",
    "Poset",
    "SimplicialComplex",
    "SizeStats",
    "ValidationError",
    "ZigzagFiltration",
    "ZigzagPoset",
    "annotate_batch",
    "annotate_complex",
    "annotate_cycle",
    "colimit",
    "column_reduce",
    "cone",
    "convert",
    "convertibility",
    "decompose",
    "generalized_rank",
    "genrank_dcomplex",
    "genrank_graph",
    "is_complement_invertible",
    "is_foldable",
    "is_limit_module",
    "kappa",
    "kernel",
    "limit",
    "limit_to_colimit_rank",
    "linearize",
    "module_from_filtration",
    "partners",
    "rank",
    "rep_sum",
    "restrict_module",
    "size_stats",
    "solve",
    "tau",
    "unfold",
    "unfold_filtration",
    "validate_filtration",
    "validate_poset",
    "zigzag_path_module",
]
