"""Two-dimensional Einstein-Weyl structures from holomorphic data."""
__version__ = "0.1.0"

from .compact import CompactFamily, cross_chart_invariant, family_report, family_to_h
from .cplx import Constant, Exp, FDScheme, HoloFn, Identity, Rational, eval_holo, holo_derivative, rational, wirtinger_fd
from .errors import (
    BorderlineError,
    ChartBoundaryError,
    DegenerateError,
    DomainError,
    PoleError,
    SingularPointError,
)
from .mobius import MobiusMap, anti_mobius_classify, gauge_transform_h, mobius_apply, mobius_compose, singular_locus
from .weyl import (
    WeylStructure,
    conformal_rescale,
    cotton_york,
    curvature_flat_gauge,
    curvature_K,
    ew_residual_full,
    ew_residual_linear,
    theorem1_structure,
)

__all__ = [
    "BorderlineError", "ChartBoundaryError", "CompactFamily", "Constant", "DegenerateError", "DomainError",
    "Exp", "FDScheme", "HoloFn", "Identity", "MobiusMap", "PoleError", "Rational", "SingularPointError",
    "WeylStructure", "anti_mobius_classify", "conformal_rescale", "cotton_york", "cross_chart_invariant",
    "curvature_K", "curvature_flat_gauge", "eval_holo", "ew_residual_full", "ew_residual_linear",
    "family_report", "family_to_h", "gauge_transform_h", "holo_derivative", "mobius_apply", "mobius_compose",
    "rational", "singular_locus", "theorem1_structure", "wirtinger_fd",
]
