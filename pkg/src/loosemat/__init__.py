"""Loose and free elements of small linear matroids over GF(q)."""

from .classify import (
    BinaryLooseVerdict,
    ColumnCensus,
    FalsificationError,
    PreconditionError,
    classify_binary_loose,
    free_structure_check,
    paving_audit,
    ternary_census,
    ternary_size_bound,
    two_loose_audit,
)
from .families import FamilyTag, build, build_figure, build_structural, golay12, ag32, fano, uniform
from .gfq import SUPPORTED_Q, FieldSpec, make_field
from .matroid import (
    LinearMatroid,
    circuits,
    contract,
    delete,
    dual,
    element_status,
    girth,
    girth_through,
    is_loose,
    is_paving,
    is_sparse_paving,
    iso_check,
    linear_matroid,
    loose_elements,
    restrict,
)
from .matvec import FqMatrix, fq_matrix, standard_rep
from .verify import SuiteConfig, SuiteOutcome, default_config, run_suite

__version__ = "0.1.0"

__all__ = [
    "BinaryLooseVerdict",
    "ColumnCensus",
    "FalsificationError",
    "FamilyTag",
    "FieldSpec",
    "FqMatrix",
    "LinearMatroid",
    "PreconditionError",
    "SUPPORTED_Q",
    "SuiteConfig",
    "SuiteOutcome",
    "ag32",
    "build",
    "build_figure",
    "build_structural",
    "circuits",
    "classify_binary_loose",
    "contract",
    "default_config",
    "delete",
    "dual",
    "element_status",
    "fano",
    "fq_matrix",
    "free_structure_check",
    "girth",
    "girth_through",
    "golay12",
    "is_loose",
    "is_paving",
    "is_sparse_paving",
    "iso_check",
    "linear_matroid",
    "loose_elements",
    "make_field",
    "paving_audit",
    "restrict",
    "run_suite",
    "standard_rep",
    "ternary_census",
    "ternary_size_bound",
    "two_loose_audit",
    "uniform",
]
