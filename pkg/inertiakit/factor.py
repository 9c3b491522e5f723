"""Inertia-revealing row-by-row factorization over ECSR storage.

Both variants eliminate row ``i`` from left to right until the diagonal is
reached. The elementary variant uses pairwise pivoting (swap when the pivot
is strictly smaller in magnitude, then subtract a multiple); the Givens
variant rotates the working row against the pivot row. The parity of row
interchanges plus diagonal sign flips tells whether ``det(A_i)`` changed sign
relative to ``det(A_{i-1})``, and summing those changes gives the number of
negative eigenvalues.

Flop convention: an elementary elimination costs one division plus two
flops per column of the pivot row; a rotation costs 5 for its setup plus
6 per column of the merged pattern.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

from .errors import NonFiniteError
from .sparse import CsrMatrix, EcsrMatrix, Ospa, Spa2, ecsr_build
from .symbolic import RowCounts, allocate_capacities, col_etree, r_row_counts

logger = logging.getLogger(__name__)

__all__ = [
    "Factorization",
    "InertiaReport",
    "Variant",
    "det_sign_sequence",
    "factorize",
    "negative_index",
    "structural_pattern",
]


class Variant(str, Enum):
    """Elimination operation used by the sweep."""

    ELEMENTARY = "elementary"
    GIVENS = "givens"

    def __str__(self) -> str:
        """Lower-case name, as accepted on the command line."""
        return self.value


@dataclass(frozen=True)
class InertiaReport:
    """Result of one factorization.

    ``nu`` is only trustworthy when ``singular_minor`` is false; a zero final
    diagonal counts as nonnegative. ``singular_rows`` lists the 0-based rows
    whose leading minor evaluated to exactly zero.
    """

    nu: int
    singular_minor: bool
    interchanges: int
    flops: int
    final_nnz: int
    max_row_nnz: int
    variant: Variant = Variant.ELEMENTARY
    n: int = 0
    singular_rows: tuple[int, ...] = ()

    def as_dict(self) -> dict[str, object]:
        """Plain mapping for JSON/CSV reports."""
        return {
            "nu": self.nu,
            "singular_minor": self.singular_minor,
            "interchanges": self.interchanges,
            "flops": self.flops,
            "final_nnz": self.final_nnz,
            "max_row_nnz": self.max_row_nnz,
            "variant": str(self.variant),
            "n": self.n,
            "singular_rows": list(self.singular_rows),
        }


@dataclass
class Factorization:
    """Final working state of a sweep plus its report."""

    report: InertiaReport
    ecsr: EcsrMatrix
    det_signs: list[int] = field(default_factory=list)


class _SignTracker:
    """Running signs of the pivot diagonals, for the determinant sequence."""

    def __init__(self, n: int) -> None:
        self.sign = [1] * n
        self.negative = 0
        self.zero = 0

    def set(self, j: int, value: float, *, fresh: bool = False) -> None:
        new = 0 if value == 0.0 else (-1 if value < 0 else 1)
        if not fresh:
            old = self.sign[j]
            self.negative -= old == -1
            self.zero -= old == 0
        self.sign[j] = new
        self.negative += new == -1
        self.zero += new == 0

    def det_sign(self, interchanges: int) -> int:
        if self.zero:
            return 0
        return -1 if (self.negative + interchanges) % 2 else 1


def _coerce_counts(A: CsrMatrix, counts: RowCounts | Sequence[int] | None) -> list[int]:
    if counts is None:
        counts = r_row_counts(A, col_etree(A))
    return allocate_capacities(A, counts)


def _check_input(A: CsrMatrix) -> None:
    if not A.structurally_symmetric:
        raise ValueError("matrix pattern must be structurally symmetric")
    _ = A.diag_pos  # raises ValueError when a diagonal entry is missing


def _first_non_finite(M: EcsrMatrix) -> int | None:
    for i in range(M.n):
        if not all(map(math.isfinite, M.val[M.head[i] : M.tail[i]])):
            return i
    return None


def factorize(
    A: CsrMatrix,
    variant: Variant | str = Variant.ELEMENTARY,
    counts: RowCounts | Sequence[int] | None = None,
    *,
    track_signs: bool = False,
) -> Factorization:
    """Run the full sweep and keep the ECSR working state.

    Parameters
    ----------
    A : CsrMatrix
        Structurally symmetric matrix with an explicit diagonal.
    variant : Variant or str
        ``"elementary"`` or ``"givens"``.
    counts : RowCounts or sequence of int, optional
        Predicted R row counts; computed from ``A`` when omitted.
    track_signs : bool
        Also record the sign of every leading principal minor.

    Raises
    ------
    CapacityError
        A row outgrew its predicted capacity.
    NonFiniteError
        The sweep produced NaN or infinity.
    """
    variant = Variant(variant)
    _check_input(A)
    n = A.n
    M = ecsr_build(A, _coerce_counts(A, counts))
    s = Ospa(n)
    spa = Spa2(n) if variant is Variant.GIVENS else None
    signs = _SignTracker(n) if track_signs else None
    det_signs: list[int] = []

    nu = interchanges = flops = 0
    singular_rows: list[int] = []
    elementary = variant is Variant.ELEMENTARY

    for i in range(n):
        s.load(M, i)
        x = 0
        while (head := s.retrieve_head()) is not None and head[0] < i:
            j, a_ij = head
            if a_ij == 0.0:
                s.remove_head()
                continue
            a_jj = M.diagonal(j)
            if elementary:
                if abs(a_jj) < abs(a_ij):
                    s.swap(M, j)
                    interchanges += 1
                    x += 1
                    if (a_jj < 0) != (a_ij < 0):
                        x += 1
                    if signs is not None:
                        signs.set(j, a_ij)
                    a_jj, a_ij = a_ij, a_jj
                factor = a_ij / a_jj
                flops += 1
                if factor != 0.0:
                    flops += 2 * s.subtract(M, j, factor)
                s.remove_head()
            else:
                # sign-preserving radius keeps U_jj's sign, so only row i's diagonal matters
                r = math.hypot(a_jj, a_ij)
                if a_jj < 0:
                    r = -r
                spa.load_with(M, j, s)
                flops += 5 + 6 * spa.rotate(a_jj / r, a_ij / r)
                spa.scatter_into(M, j, s)
                if signs is not None:
                    signs.set(j, r)

        d = s.values[i] if s.occupied[i] else 0.0
        if d < 0:
            x += 1
        elif d == 0.0:
            singular_rows.append(i)
        if x % 2:
            nu += 1
        if signs is not None:
            signs.set(i, d, fresh=True)
            det_signs.append(signs.det_sign(interchanges))
        if not all(math.isfinite(s.values[c]) for c in s.heap):
            raise NonFiniteError("non-finite value produced", row=i)
        s.store(M, i)

    bad = _first_non_finite(M)
    if bad is not None:
        raise NonFiniteError("non-finite value produced", row=bad)

    report = InertiaReport(
        nu=nu,
        singular_minor=bool(singular_rows),
        interchanges=interchanges,
        flops=flops,
        final_nnz=M.nnz(),
        max_row_nnz=M.max_row_nnz(),
        variant=variant,
        n=n,
        singular_rows=tuple(singular_rows),
    )
    logger.debug(
        "factorized n=%d variant=%s nu=%d singular=%s flops=%d nnz=%d",
        n,
        variant,
        nu,
        report.singular_minor,
        flops,
        report.final_nnz,
    )
    return Factorization(report, M, det_signs)


def negative_index(
    A: CsrMatrix,
    variant: Variant | str = Variant.ELEMENTARY,
    counts: RowCounts | Sequence[int] | None = None,
) -> InertiaReport:
    """Number of negative eigenvalues of ``A`` with sweep statistics.

    Examples
    --------
    >>> negative_index(CsrMatrix.from_dense([[0.0, 1.0], [1.0, 0.0]])).nu
    1
    """
    return factorize(A, variant, counts).report


def det_sign_sequence(A: CsrMatrix, variant: Variant | str = Variant.ELEMENTARY) -> list[int]:
    """Signs (-1, 0 or 1) of ``det(A_1), ..., det(A_n)`` as tracked by the sweep."""
    return factorize(A, variant, track_signs=True).det_signs


def structural_pattern(
    A: CsrMatrix, variant: Variant | str = Variant.ELEMENTARY
) -> list[tuple[int, ...]]:
    """Occupied columns of every row after the sweep, exact zeros included."""
    return factorize(A, variant).ecsr.pattern()
