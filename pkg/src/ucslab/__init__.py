"""Exact and smoothed computations around union-closed set families."""

from .family import (CapExceeded, FranklReport, SetFamily, build_threshold_family,
                     count_union_closed, element_degrees, enumerate_union_closed,
                     frankl_check, is_union_closed, union_closure)
from .halfspace import HalfspaceSystem, Row, synthesize_halfspaces

__version__ = "0.1.0"

__all__ = [
    "CapExceeded", "FranklReport", "SetFamily", "build_threshold_family",
    "count_union_closed", "element_degrees", "enumerate_union_closed", "frankl_check",
    "is_union_closed", "union_closure", "HalfspaceSystem", "Row", "synthesize_halfspaces",
]
