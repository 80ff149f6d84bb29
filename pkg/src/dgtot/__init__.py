"""Exact computations with totalings of complexes of graded free modules."""

__version__ = "0.1.0"

from .algebra import QQ, Field, Poly, PolyRing
from .complex import ComplexMorphism, GradedComplex
from .crossing import detot, eliminate_crossing, has_crossing, partition, rank3_classify
from .dg import DGMorphism, SemifreeDG, dg_homology, validate_dg
from .graded import GradedMatrix, TwistedFreeModule
from .obstruction import end0, is_indecomposable, minimal_free_resolution, tot_image_obstruction
from .parsing import parse, serialize
from .totaling import tensor_compat_check, tor_decomposition_check, tot, tot_morphism
from .univariate import embed, graded_diagonalize, homology_decompose

__all__ = [
    "QQ", "Field", "Poly", "PolyRing", "ComplexMorphism", "GradedComplex", "detot",
    "eliminate_crossing", "has_crossing", "partition", "rank3_classify", "DGMorphism",
    "SemifreeDG", "dg_homology", "validate_dg", "GradedMatrix", "TwistedFreeModule", "end0",
    "is_indecomposable", "minimal_free_resolution", "tot_image_obstruction", "parse",
    "serialize", "tensor_compat_check", "tor_decomposition_check", "tot", "tot_morphism",
    "embed", "graded_diagonalize", "homology_decompose",
]
