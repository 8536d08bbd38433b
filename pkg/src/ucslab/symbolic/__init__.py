"""Exact symbolic engine: polynomials, signed exponential sums, elimination."""

from .appendix import appendix_audit
from .expsum import RemarkHypothesisError, SignedExpSum, exp_moment, remark_check
from .pipeline import (ReducedSystem, ResultantScanReport, build_reduced_system,
                       eliminate_and_resultant, lambda_zero_system, scan_resultants)
from .poly import InexactDivision, MultiPoly, NonAffinePivot
from .resultant import isolate_real_roots, resultant
from .tilde import build_tilde

__all__ = [
    "appendix_audit", "RemarkHypothesisError", "SignedExpSum", "exp_moment", "remark_check",
    "ReducedSystem", "ResultantScanReport", "build_reduced_system", "eliminate_and_resultant",
    "lambda_zero_system", "scan_resultants", "InexactDivision", "MultiPoly", "NonAffinePivot",
    "isolate_real_roots", "resultant", "build_tilde",
]
