"""Exact computations with filtered de Rham modules with Frobenius and Higgs modules.

Everything is computed with integers modulo p^m; equality is exact.
"""

from .associate import (
    associate_subsheaf,
    change_of_frobenius_residual,
    glue_associated,
    lifting_independent,
    per_level_residual,
    phi_div,
    phi_tilde,
    residuals,
)
from .descent import (
    cartier_descend_flat,
    cartier_katz_descent,
    conjugate_filtration,
    determinant_formula_check,
    inverse_cartier_exponential_twisting,
    p_curvature,
    filtration_identity,
    roundtrip_check,
)
from .errors import MFError
from .fixture import FixtureDocument, load
from .glue import GluedObject, Overlap
from .mfdata import (
    FilteredDeRhamChart,
    FrobeniusLifting,
    HiggsChart,
    build_sum,
    build_sym2,
    build_tensor,
    gr_fil,
    transport_frobenius,
    validate,
)
from .padic import PadicScalar
from .poly import ChartRing, RingElement
from .submodule import Submodule

__all__ = [
    "ChartRing", "FilteredDeRhamChart", "FixtureDocument", "FrobeniusLifting", "GluedObject",
    "HiggsChart", "MFError", "Overlap", "PadicScalar", "RingElement", "Submodule",
    "associate_subsheaf", "build_sum", "build_sym2", "build_tensor", "cartier_descend_flat",
    "cartier_katz_descent", "change_of_frobenius_residual", "conjugate_filtration",
    "determinant_formula_check", "glue_associated", "gr_fil", "inverse_cartier_exponential_twisting",
    "lifting_independent", "load", "p_curvature", "per_level_residual", "phi_div", "phi_tilde",
    "filtration_identity", "residuals", "roundtrip_check", "transport_frobenius", "validate",
]
