"""Pointwise exterior algebra for strongly self-dual 2-forms and SO(N) curvature bounds."""

__version__ = "0.1.0"

from .errors import CapabilityError, FormError, NotApplicableError, NumericalError
from .exterior import KForm, hodge, inner, top_scalar, wedge, wedge_power
from .skew import (InvariantSet, SkewForm, Spectrum, eq21_residuals, invariants,
                   maclaurin_gaps, pfaffian, spectrum)
from .selfdual import (Classification, GapReport, SelfDualityReport, TrautmanReport,
                       classify, grossman_check, lemma22_gaps, pair_bound, random_asd,
                       random_skew, random_ssd, trautman_check)
from .curvature import (BoundReport, CurvatureInvariants, CurvatureMatrix, bound_eq32,
                        bound_eq33, bound_eq35, product_config, sigma4_oracle,
                        so4_saturating)

__all__ = [
    "BoundReport", "CapabilityError", "Classification", "CurvatureInvariants",
    "CurvatureMatrix", "FormError", "GapReport", "InvariantSet", "KForm",
    "NotApplicableError", "NumericalError", "SelfDualityReport", "SkewForm",
    "Spectrum", "TrautmanReport", "bound_eq32", "bound_eq33", "bound_eq35",
    "classify", "eq21_residuals", "grossman_check", "hodge", "inner", "invariants",
    "lemma22_gaps", "maclaurin_gaps", "pair_bound", "pfaffian", "product_config",
    "random_asd", "random_skew", "random_ssd", "sigma4_oracle", "so4_saturating",
    "spectrum", "top_scalar", "trautman_check", "wedge", "wedge_power",
]
