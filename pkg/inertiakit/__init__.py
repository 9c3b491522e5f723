"""Public API exports for InertiaKit.

Sparse symmetric inertia by row-by-row elimination (pairwise pivoting or
Givens rotations), a bisection eigensolver on top of it, and dense oracles.
"""

from __future__ import annotations

# file: inertiakit/__init__.py
from .eig import (
    BisectionParams,
    EigResult,
    Histogram,
    IntervalCount,
    count_in_interval,
    eig_all,
    eig_by_ordinal,
    eig_in_interval,
    spectrum_histogram,
)
from .errors import (
    CapacityError,
    ConvergenceError,
    InertiaKitError,
    InputFormatError,
    MonotonicityWarning,
    NonFiniteError,
    NotSymmetricError,
    PermutationError,
    RetryBudgetWarning,
    SingularMinorWarning,
)
from .factor import InertiaReport, Variant, det_sign_sequence, negative_index, structural_pattern
from .mmio import Permutation, apply_ordering, read_matrix_market, read_permutation, write_matrix_market
from .sparse import CsrMatrix, EcsrMatrix, csr_from_triplets, csr_one_norm, csr_shift, ecsr_build
from .symbolic import ColEtree, RowCounts, allocate_capacities, col_etree, r_row_counts

__version__ = "0.1.0"

__all__ = [
    "BisectionParams",
    "CapacityError",
    "ColEtree",
    "ConvergenceError",
    "CsrMatrix",
    "EcsrMatrix",
    "EigResult",
    "Histogram",
    "InertiaKitError",
    "InertiaReport",
    "InputFormatError",
    "IntervalCount",
    "MonotonicityWarning",
    "NonFiniteError",
    "NotSymmetricError",
    "Permutation",
    "PermutationError",
    "RetryBudgetWarning",
    "RowCounts",
    "SingularMinorWarning",
    "Variant",
    "allocate_capacities",
    "apply_ordering",
    "col_etree",
    "count_in_interval",
    "csr_from_triplets",
    "csr_one_norm",
    "csr_shift",
    "det_sign_sequence",
    "ecsr_build",
    "eig_all",
    "eig_by_ordinal",
    "eig_in_interval",
    "negative_index",
    "r_row_counts",
    "read_matrix_market",
    "read_permutation",
    "spectrum_histogram",
    "structural_pattern",
    "write_matrix_market",
]
